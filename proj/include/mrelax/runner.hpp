#pragma once

#include <string>
#include <vector>

#include "mrelax/config.hpp"
#include "mrelax/integrator.hpp"
#include "mrelax/relaxvars.hpp"

namespace mrelax {

struct DecayFitSummary {
  std::string series;
  bool ok = false;
  double rate = 0.0, r_squared = 0.0, t_lo = 0.0, t_hi = 0.0;
  int n_used = 0;
  std::string error;
};

// Everything the verification harness asserts about one run, computed from
// the recorded time series.
struct RunSummary {
  std::string tag;
  HaltCause halt = HaltCause::completed;
  std::string halt_message;
  double halt_time = 0.0;
  long halt_index = -1;
  long steps = 0;
  double wall_seconds = 0.0;

  double mass_drift_rel = 0.0;
  double flux_drift_rel = 0.0;
  double energy_increase_rel = 0.0;   // worst record-to-record E increase / E(0)
  double min_w_drop_rel = 0.0;        // worst relative drop of min_x w
  double min_z_drop_rel = 0.0;
  double max_Z = 0.0;                 // exp(-min over records of min_z)
  // max over records (dissipation > 1e-8) of |dE/dt_fd + dissipation|/dissipation
  double fd_energy_match_max_rel_err = std::numeric_limits<double>::quiet_NaN();
  double min_rho_run = 0.0, max_rho_run = 0.0, max_abs_b_run = 0.0;

  std::vector<DecayFitSummary> fits;
  // Linearization-based reference 2*min(alpha,beta)(rho_bar,b_bar)*k1^2,
  // reported alongside the fitted rates for comparison only.
  double rate_reference_linearized = 0.0;
};

struct RunArtifacts {
  Trajectory trajectory;
  RunSummary summary;
};

// Integrates the configured scenario and derives the summary; throws
// ConfigError for invalid configs, never for run-time halts (those are
// recorded in the summary).
RunArtifacts execute_run(const RunConfig& cfg);

// CSV schema: t,mass,flux_mean,energy,dissipation,min_rho,max_rho,max_abs_b,
// min_w,min_z,l2_rho_dev,l2_b_dev[,hs{s}_rho,hs{s}_b...],coupled1,coupled2,dt
// Numbers carry 17 significant digits so re-reading reproduces the doubles.
void write_series_csv(const std::string& path, const Trajectory& traj,
                      const std::vector<int>& s_list);
void write_summary_json(const std::string& path, const RunConfig& cfg, const RunSummary& summary);
// One CSV per snapshot: header x,rho,b,ux,uz; files named <prefix>_<k>.csv.
void write_snapshots(const std::string& prefix, const Trajectory& traj, const Params& p);

std::string summary_to_json(const RunConfig& cfg, const RunSummary& summary);

// Level-curve table CSV with header rho,b,value,branch.
void write_level_csv(const std::string& path, const std::vector<relaxvars::LevelPoint>& table);

// Exit-code mapping shared by the CLI and the tests: 0 completed, 2 config
// error, 3 vacuum breach, 4 stiffness collapse, 5 evaluation error.
int exit_code_for(HaltCause h);

// 17-significant-digit formatting used by every CSV/JSON emitter.
std::string format_g17(double v);

}  // namespace mrelax
