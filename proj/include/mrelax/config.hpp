#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mrelax/integrator.hpp"
#include "mrelax/model.hpp"

namespace mrelax {

// One Fourier component of the initial perturbation: amp*cos(mode*2*pi*x/L + phase).
struct PerturbationMode {
  int mode = 1;  // >= 1 so the declared mean is untouched
  double amplitude = 0.0;
  double phase = 0.0;
};

struct InitialData {
  double rho_mean = 1.0;
  double b_mean = 0.0;
  std::vector<PerturbationMode> rho_pert;
  std::vector<PerturbationMode> b_pert;
};

struct OutputConfig {
  std::string series_path;    // time-series CSV ("" = skip)
  std::string summary_path;   // run-summary JSON ("" = skip)
  std::string snapshot_prefix;
  std::vector<double> snapshot_times;
};

struct ConvergeConfig {
  std::vector<int> n_sweep{32, 64, 128, 256};
  int reference_n = 512;
  std::vector<double> eps_sweep{0.0, 1e-4, 1e-3};
  int eps_study_n = 128;
  int richardson_n = 64;
  double richardson_cfl = 0.8;
  int richardson_levels = 3;
  // short horizon: the stiff modes that carry the measurable temporal error
  // must still be alive at measurement time
  double richardson_t = 0.02;
};

struct RunConfig {
  std::string tag;
  std::size_t n = 128;
  double length = kTwoPi;
  Params params;
  InitialData initial;
  StepControl step;
  double cadence = 0.01;
  std::vector<int> s_list;
  OutputConfig output;
  ConvergeConfig converge;
};

// key = value sections; duplicate rho_pert/b_pert keys accumulate modes.
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

// Full validation: parameter ranges, perturbation modes >= 1, and positivity
// of the initial density evaluated on the grid. Throws ConfigError.
void validate_config(const RunConfig& cfg);

// Builds the initial State on the configured grid.
State build_initial_state(const RunConfig& cfg);

// Built-in scenarios: relax-b0, relax-bbar, probe-vacuum, converge-base.
RunConfig builtin_scenario(const std::string& tag);
std::vector<std::string> builtin_scenario_names();

}  // namespace mrelax
