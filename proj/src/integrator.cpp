#include "mrelax/integrator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "mrelax/errors.hpp"
#include "mrelax/relaxvars.hpp"

namespace mrelax {

double stable_dt(const State& s, const Params& p, const StepControl& c) {
  const std::size_t i = argmin_rho(s.rho);
  if (!(s.rho[i] > 0.0))
    throw VacuumError(s.time, i, "stable_dt: state has nonpositive density");
  double max_alpha = 0.0;
  for (std::size_t j = 0; j < s.rho.size(); ++j) {
    max_alpha = std::max(max_alpha, relaxvars::eval_alpha(s.rho[j], s.b[j], p));
  }
  const double dx = s.rho.grid().dx;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  double bound = dx * dx / (pi2 * max_alpha);
  if (p.epsilon > 0.0) {
    bound = std::min(bound, dx * dx * dx * dx / (pi2 * pi2 * p.epsilon));
  }
  const double dt = c.cfl * bound;
  if (dt < c.dt_min)
    throw StiffnessError(s.time, "stiffness collapse: stable dt " + std::to_string(dt) +
                                     " fell below dt_min " + std::to_string(c.dt_min));
  return std::min(dt, c.dt_max);
}

namespace {

struct RkStage {
  Field drho, db;
};

void rk4_step_into(const State& s, const Params& p, double dt, bool dealias, State& out,
                   RhsWorkspace& ws) {
  const GridPtr& g = s.rho.grid_ptr();
  const std::size_t n = g->n;
  RkStage K1{Field(g), Field(g)}, K2{Field(g), Field(g)}, K3{Field(g), Field(g)},
      K4{Field(g), Field(g)};
  State stage{Field(g), Field(g), s.time};

  rhs(s, p, K1.drho, K1.db, ws, dealias);
  for (std::size_t i = 0; i < n; ++i) {
    stage.rho[i] = s.rho[i] + 0.5 * dt * K1.drho[i];
    stage.b[i] = s.b[i] + 0.5 * dt * K1.db[i];
  }
  stage.time = s.time + 0.5 * dt;
  rhs(stage, p, K2.drho, K2.db, ws, dealias);
  for (std::size_t i = 0; i < n; ++i) {
    stage.rho[i] = s.rho[i] + 0.5 * dt * K2.drho[i];
    stage.b[i] = s.b[i] + 0.5 * dt * K2.db[i];
  }
  rhs(stage, p, K3.drho, K3.db, ws, dealias);
  for (std::size_t i = 0; i < n; ++i) {
    stage.rho[i] = s.rho[i] + dt * K3.drho[i];
    stage.b[i] = s.b[i] + dt * K3.db[i];
  }
  stage.time = s.time + dt;
  rhs(stage, p, K4.drho, K4.db, ws, dealias);

  if (out.rho.size() != n) out = State{Field(g), Field(g), 0.0};
  const double w = dt / 6.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.rho[i] = s.rho[i] + w * (K1.drho[i] + 2.0 * K2.drho[i] + 2.0 * K3.drho[i] + K4.drho[i]);
    out.b[i] = s.b[i] + w * (K1.db[i] + 2.0 * K2.db[i] + 2.0 * K3.db[i] + K4.db[i]);
  }
  out.time = s.time + dt;

  const std::size_t imin = argmin_rho(out.rho);
  if (!(out.rho[imin] > 0.0)) {
    throw VacuumError(out.time, imin,
                      "vacuum breach after step: min rho = " + std::to_string(out.rho[imin]) +
                          " at grid index " + std::to_string(imin));
  }
}

}  // namespace

State step(const State& s, const Params& p, double dt, bool dealias) {
  if (!(dt > 0.0)) throw ConfigError("step: dt must be positive");
  State out;
  RhsWorkspace ws;
  rk4_step_into(s, p, dt, dealias, out, ws);
  return out;
}

std::string halt_cause_name(HaltCause h) {
  switch (h) {
    case HaltCause::completed: return "completed";
    case HaltCause::vacuum_breach: return "vacuum_breach";
    case HaltCause::stiffness_collapse: return "stiffness_collapse";
    case HaltCause::eval_error: return "eval_error";
  }
  return "unknown";
}

Trajectory run(const State& s0, const Params& p, const StepControl& c, const ObserverConfig& obs) {
  const auto wall_start = std::chrono::steady_clock::now();
  Trajectory traj;
  RhsWorkspace ws;
  State cur = s0;
  State next;

  std::vector<double> snaps = obs.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  std::size_t next_snap = 0;
  // time comparisons tolerate one rounding ulp of accumulated time
  const double t_eps = 1e-12 * std::max(1.0, std::abs(c.t_end));

  double last_dt = 0.0;
  auto finish = [&](HaltCause cause, const std::string& msg, double t, long idx) {
    traj.halt = cause;
    traj.halt_message = msg;
    traj.halt_time = t;
    traj.halt_index = idx;
    traj.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  };

  try {
    {
      const std::size_t imin = argmin_rho(cur.rho);
      if (!(cur.rho[imin] > 0.0))
        throw VacuumError(cur.time, imin,
                          "vacuum breach: initial min rho = " + std::to_string(cur.rho[imin]) +
                              " at grid index " + std::to_string(imin));
    }
    traj.records.push_back({cur.time, record(cur, p, obs.diag, 0.0)});
    while (next_snap < snaps.size() && snaps[next_snap] <= cur.time + t_eps) {
      traj.snapshots.push_back({cur.time, cur});
      ++next_snap;
    }
    double next_record = cur.time + obs.cadence;
    while (cur.time < c.t_end - t_eps) {
      double dt = stable_dt(cur, p, c);
      // land exactly on the next observation boundary / snapshot / horizon
      double target = std::min(next_record, c.t_end);
      if (next_snap < snaps.size()) target = std::min(target, snaps[next_snap]);
      if (cur.time + dt > target) dt = target - cur.time;
      rk4_step_into(cur, p, dt, c.dealias, next, ws);
      std::swap(cur, next);
      ++traj.steps;
      last_dt = dt;

      if (next_snap < snaps.size() && cur.time >= snaps[next_snap] - t_eps) {
        traj.snapshots.push_back({cur.time, cur});
        ++next_snap;
      }
      if (cur.time >= next_record - t_eps || cur.time >= c.t_end - t_eps) {
        traj.records.push_back({cur.time, record(cur, p, obs.diag, last_dt)});
        while (next_record <= cur.time + t_eps) next_record += obs.cadence;
      }
    }
    finish(HaltCause::completed, "", cur.time, -1);
  } catch (const VacuumError& e) {
    finish(HaltCause::vacuum_breach, e.what(), e.time, static_cast<long>(e.index));
  } catch (const StiffnessError& e) {
    finish(HaltCause::stiffness_collapse, e.what(), e.time, -1);
  } catch (const QuadratureError& e) {
    finish(HaltCause::eval_error, e.what(), cur.time, -1);
  }
  return traj;
}

State run_fixed_dt(const State& s0, const Params& p, double dt, double t_end, bool dealias) {
  if (!(dt > 0.0) || !(t_end > 0.0)) throw ConfigError("run_fixed_dt: dt and t_end must be positive");
  const long n_steps = std::max(1L, std::lround(t_end / dt));
  const double h = t_end / static_cast<double>(n_steps);
  RhsWorkspace ws;
  State cur = s0;
  State next;
  for (long k = 0; k < n_steps; ++k) {
    rk4_step_into(cur, p, h, dealias, next, ws);
    std::swap(cur, next);
  }
  return cur;
}

}  // namespace mrelax
