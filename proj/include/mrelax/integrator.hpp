#pragma once

#include <string>
#include <vector>

#include "mrelax/diagnostics.hpp"
#include "mrelax/model.hpp"

namespace mrelax {

struct StepControl {
  double cfl = 0.5;  // safety factor in (0, 1]
  double dt_min = 1e-12;
  double dt_max = std::numeric_limits<double>::infinity();
  double t_end = 0.0;
  bool dealias = false;  // 2/3-rule truncation of nonlinear products
};

// cfl * min(dx^2/(pi^2 max alpha), dx^4/(pi^4 eps)), capped at dt_max.
// Throws StiffnessError when the stability bound falls below dt_min.
double stable_dt(const State& s, const Params& p, const StepControl& c);

// One classical RK4 step; density positivity is checked at every stage and
// after the update. Throws VacuumError on breach.
State step(const State& s, const Params& p, double dt, bool dealias = false);

enum class HaltCause { completed, vacuum_breach, stiffness_collapse, eval_error };

std::string halt_cause_name(HaltCause h);

struct RecordPoint {
  double time;
  DiagnosticsRecord rec;
};

struct Snapshot {
  double time;
  State state;
};

struct Trajectory {
  std::vector<RecordPoint> records;
  std::vector<Snapshot> snapshots;
  HaltCause halt = HaltCause::completed;
  std::string halt_message;
  double halt_time = 0.0;
  long halt_index = -1;  // grid index for vacuum breaches
  long steps = 0;
  double wall_seconds = 0.0;
};

struct ObserverConfig {
  double cadence = 0.1;  // diagnostics interval in simulation time
  std::vector<double> snapshot_times;
  DiagnosticsOptions diag;
};

// Method-of-lines integration to t_end (or to a halting error, which is a
// recorded outcome rather than an exception). The step size is recomputed
// from the stability bound every step and clamped so records, snapshots and
// t_end are hit exactly.
Trajectory run(const State& s0, const Params& p, const StepControl& c, const ObserverConfig& obs);

// Integration with a fixed step count N = round(t_end/dt), used by the
// temporal-order study. No observers; returns the terminal state.
State run_fixed_dt(const State& s0, const Params& p, double dt, double t_end,
                   bool dealias = false);

}  // namespace mrelax
