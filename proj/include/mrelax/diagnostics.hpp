#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mrelax/model.hpp"
#include "mrelax/quadrature.hpp"

namespace mrelax {

struct DiagnosticsOptions {
  std::vector<int> s_list;  // Sobolev seminorm orders to record
  // Reference constant state (rho_bar, b_bar); deviations and coupled norms
  // are measured against it. Defaults to the instantaneous means when absent.
  std::optional<std::pair<double, double>> reference;
  QuadOptions quad;
};

struct DiagnosticsRecord {
  double time = 0.0;
  double mass = 0.0;       // mean rho
  double flux_mean = 0.0;  // mean B
  double energy = 0.0;
  // Baseline-subtracted energy, accumulated pointwise against the reference
  // constants. Carries ~10 more significant digits of the *change* in energy
  // than `energy` itself (which rounds at eps * E_total); used for the
  // dE/dt vs -dissipation comparison. Not part of the CSV schema.
  double energy_dev = 0.0;
  double dissipation = 0.0;
  double min_rho = 0.0, max_rho = 0.0, max_abs_b = 0.0;
  double min_w = 0.0, min_z = 0.0;  // +inf when every grid point sits on the branch set
  bool all_w_infinite = false, all_z_infinite = false;
  double l2_rho_dev = 0.0, l2_b_dev = 0.0;
  std::vector<double> hs_rho, hs_b;
  double coupled1 = std::numeric_limits<double>::quiet_NaN();
  double coupled2 = std::numeric_limits<double>::quiet_NaN();
  double dt_used = 0.0;
};

// Grid quadrature of rho^gamma/(gamma(gamma-1)) + B^2/2.
double energy(const State& s, const Params& p);

// Grid quadrature of (rho^(g-3/2) rho_x + B rho^(-1/2) B_x)^2 + (B0 rho^(-1/2) B_x)^2;
// the exact continuous identity is dE/dt = -dissipation.
double dissipation(const State& s, const Params& p);

DiagnosticsRecord record(const State& s, const Params& p, const DiagnosticsOptions& opt,
                         double dt_used);

struct DecayFit {
  double rate = 0.0;       // sigma in value ~ C exp(-sigma t)
  double r_squared = 0.0;  // goodness of the log-linear fit
  double t_lo = 0.0, t_hi = 0.0;
  int n_used = 0;
};

// Least squares of log(value) against time over [t_lo, t_hi]; samples at or
// below 1e-12 are dropped as roundoff floor. Throws FitError when fewer than
// 10 usable samples remain.
DecayFit fit_decay(std::span<const double> times, std::span<const double> values, double t_lo,
                   double t_hi);

// Default fit window: value inside [1e-8, 1e-2] (above the roundoff floor,
// inside the linearized regime). Empty when the series never enters it.
std::optional<std::pair<double, double>> default_decay_window(std::span<const double> times,
                                                              std::span<const double> values);

}  // namespace mrelax
