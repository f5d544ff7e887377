#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mrelax/model.hpp"

namespace mrelax {

struct AuditOptions {
  double rho_lo = 0.2, rho_hi = 3.0;
  double b_lo = -2.0, b_hi = 2.0;
  int n_points = 200;
  std::uint64_t seed = 1;
  // Half-width of the excluded tube around the branch set: samples keep
  // |b| > exclusion and |rho^gamma - b0^2| > exclusion.
  double exclusion = 0.1;
  // When finite, replaces every per-check tolerance (negative-control knob).
  double tol_override = std::numeric_limits<double>::quiet_NaN();
  double fd_step = 1e-5;
  int simpson_panels = 1000000;
};

struct AuditCheck {
  std::string name;
  double max_err = 0.0;
  double tol = 0.0;
  int n_points = 0;
  int n_skipped = 0;
  bool pass = true;
};

struct AuditReport {
  Params params;
  AuditOptions options;
  std::vector<AuditCheck> checks;
  bool pass = true;
};

// Draws deterministic pseudo-random points in the box minus the exclusion
// tube and runs every closed-form identity, finite-difference and quadrature
// cross-check of the relaxation-variable machinery.
AuditReport run_audit(const Params& p, const AuditOptions& opt);

// Byte-stable JSON serialization (identical bytes for identical seed/options).
std::string audit_report_json(const AuditReport& report);

}  // namespace mrelax
