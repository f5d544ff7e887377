#pragma once

#include <string>
#include <vector>

#include "mrelax/config.hpp"

namespace mrelax {

struct SweepCell {
  int n = 0;
  double eps = 0.0;
  std::string status;  // "ok" or the halting/exception message
  double dist = std::numeric_limits<double>::quiet_NaN();
  long steps = 0;
};

struct ConvergeReport {
  // spatial study at eps = 0 against the reference_n run
  std::vector<SweepCell> spatial;
  std::vector<double> spatial_orders;  // log2(err_i / err_{i+1}) per pair
  bool spatial_ok = false;
  double spatial_floor = 1e-12;

  // terminal-state distances |u_eps - u_0| at the eps-study resolution
  std::vector<SweepCell> epsilon;
  bool eps_monotone = false;

  // temporal Richardson ladder at fixed dt halvings
  std::vector<double> richardson_dt;
  std::vector<double> richardson_dist;
  std::vector<double> richardson_orders;
  double temporal_order = 0.0;  // order of the finest resolvable pair
  int temporal_pair_used = -1;

  double wall_seconds = 0.0;
};

// Runs the configured scenario across the resolution sweep, the epsilon sweep
// and the fixed-step Richardson ladder. Per-cell failures are recorded in the
// cell status and do not abort the sweep.
ConvergeReport run_converge(const RunConfig& base);

std::string converge_report_json(const ConvergeReport& report);

}  // namespace mrelax
