#include "mrelax/converge.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <json.hpp>

#include "mrelax/errors.hpp"
#include "mrelax/threads.hpp"

namespace mrelax {
namespace {

struct TerminalRun {
  State state;
  long steps = 0;
};

// Integrate to t_end without observer overhead; throws on halting errors.
TerminalRun terminal_state(const RunConfig& cfg) {
  State cur = build_initial_state(cfg);
  StepControl c = cfg.step;
  RhsWorkspace ws;
  TerminalRun out;
  const double t_eps = 1e-12 * std::max(1.0, c.t_end);
  State next;
  while (cur.time < c.t_end - t_eps) {
    double dt = stable_dt(cur, cfg.params, c);
    if (cur.time + dt > c.t_end) dt = c.t_end - cur.time;
    next = step(cur, cfg.params, dt, c.dealias);
    std::swap(cur, next);
    ++out.steps;
  }
  out.state = std::move(cur);
  return out;
}

// L2 distance of two states on nested grids, sampled at the common points.
double state_distance(const State& coarse, const State& fine) {
  const std::size_t nc = coarse.rho.size();
  const std::size_t nf = fine.rho.size();
  if (nf % nc != 0) throw ConfigError("state_distance: grids are not nested");
  const std::size_t stride = nf / nc;
  const double dx = coarse.rho.grid().dx;
  double acc = 0.0;
  for (std::size_t i = 0; i < nc; ++i) {
    const double dr = coarse.rho[i] - fine.rho[i * stride];
    const double db = coarse.b[i] - fine.b[i * stride];
    acc += dr * dr + db * db;
  }
  return std::sqrt(dx * acc);
}

double state_norm_scale(const State& s) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.rho.size(); ++i)
    acc += s.rho[i] * s.rho[i] + s.b[i] * s.b[i];
  return std::sqrt(s.rho.grid().dx * acc);
}

}  // namespace

ConvergeReport run_converge(const RunConfig& base) {
  const auto wall_start = std::chrono::steady_clock::now();
  validate_config(base);
  ConvergeReport rep;
  const ConvergeConfig& cc = base.converge;

  // ---- spatial study against the fine reference ---------------------------
  {
    RunConfig ref_cfg = base;
    ref_cfg.n = static_cast<std::size_t>(cc.reference_n);
    ref_cfg.params.epsilon = 0.0;
    TerminalRun ref;
    bool have_ref = false;
    try {
      ref = terminal_state(ref_cfg);
      have_ref = true;
    } catch (const std::exception& e) {
      SweepCell cell{cc.reference_n, 0.0, std::string("reference failed: ") + e.what(), 0.0, 0};
      rep.spatial.push_back(cell);
    }
    if (have_ref) {
      std::vector<SweepCell> cells(cc.n_sweep.size());
      parallel_for_index(cc.n_sweep.size(), [&](std::size_t i) {
        SweepCell& cell = cells[i];
        cell.n = cc.n_sweep[i];
        cell.eps = 0.0;
        try {
          RunConfig cfg = base;
          cfg.n = static_cast<std::size_t>(cell.n);
          cfg.params.epsilon = 0.0;
          const TerminalRun run = terminal_state(cfg);
          cell.dist = state_distance(run.state, ref.state);
          cell.steps = run.steps;
          cell.status = "ok";
        } catch (const std::exception& e) {
          cell.status = e.what();
        }
      });
      rep.spatial.insert(rep.spatial.end(), cells.begin(), cells.end());
      bool ok = false, all_pairs_ok = true;
      for (std::size_t i = 0; i + 1 < rep.spatial.size(); ++i) {
        const SweepCell& a = rep.spatial[i];
        const SweepCell& b = rep.spatial[i + 1];
        if (a.status != "ok" || b.status != "ok") {
          all_pairs_ok = false;
          continue;
        }
        rep.spatial_orders.push_back(std::log2(a.dist / b.dist) /
                                     std::log2(static_cast<double>(b.n) / a.n));
        // below the spectral floor the pair counts as converged
        if (b.dist < rep.spatial_floor) {
          ok = true;
          continue;
        }
        const double required = a.dist * std::pow(static_cast<double>(a.n) / b.n, 4.0);
        if (b.dist <= required) ok = true;
        else all_pairs_ok = false;
      }
      rep.spatial_ok = ok && all_pairs_ok;
    }
  }

  // ---- epsilon study -------------------------------------------------------
  {
    std::vector<double> eps_list = cc.eps_sweep;
    std::sort(eps_list.begin(), eps_list.end());
    State base_state;
    bool have_base = false;
    try {
      RunConfig cfg = base;
      cfg.n = static_cast<std::size_t>(cc.eps_study_n);
      cfg.params.epsilon = 0.0;
      base_state = terminal_state(cfg).state;
      have_base = true;
    } catch (const std::exception& e) {
      rep.epsilon.push_back({cc.eps_study_n, 0.0, e.what(), 0.0, 0});
    }
    if (have_base) {
      std::vector<SweepCell> cells(eps_list.size());
      parallel_for_index(eps_list.size(), [&](std::size_t i) {
        SweepCell& cell = cells[i];
        cell.n = cc.eps_study_n;
        cell.eps = eps_list[i];
        try {
          RunConfig cfg = base;
          cfg.n = static_cast<std::size_t>(cc.eps_study_n);
          cfg.params.epsilon = cell.eps;
          const TerminalRun run = terminal_state(cfg);
          cell.dist = state_distance(run.state, base_state);
          cell.steps = run.steps;
          cell.status = "ok";
        } catch (const std::exception& e) {
          cell.status = e.what();
        }
      });
      rep.epsilon.insert(rep.epsilon.end(), cells.begin(), cells.end());
      bool mono = true;
      int compared = 0;
      for (std::size_t i = 0; i + 1 < rep.epsilon.size(); ++i) {
        const SweepCell& a = rep.epsilon[i];
        const SweepCell& b = rep.epsilon[i + 1];
        if (a.status != "ok" || b.status != "ok") continue;
        ++compared;
        if (!(a.dist <= b.dist)) mono = false;  // eps sorted ascending
      }
      rep.eps_monotone = mono && compared > 0;
    }
  }

  // ---- temporal Richardson ladder -----------------------------------------
  {
    RunConfig cfg = base;
    cfg.n = static_cast<std::size_t>(cc.richardson_n);
    const State s0 = build_initial_state(cfg);
    StepControl rc = cfg.step;
    rc.cfl = cc.richardson_cfl;
    const double dt0 = stable_dt(s0, cfg.params, rc);
    const double T = cc.richardson_t;
    std::vector<State> terminals;
    for (int j = 0; j <= cc.richardson_levels; ++j) {
      const double dt = dt0 / static_cast<double>(1 << j);
      rep.richardson_dt.push_back(dt);
      terminals.push_back(run_fixed_dt(s0, cfg.params, dt, T, cfg.step.dealias));
    }
    for (std::size_t j = 0; j + 1 < terminals.size(); ++j) {
      rep.richardson_dist.push_back(state_distance(terminals[j], terminals[j + 1]));
    }
    for (std::size_t j = 0; j + 1 < rep.richardson_dist.size(); ++j) {
      rep.richardson_orders.push_back(std::log2(rep.richardson_dist[j] / rep.richardson_dist[j + 1]));
    }
    // pick the finest pair whose distance is still clearly above roundoff
    const double floor = 1e-13 * state_norm_scale(s0);
    for (int j = static_cast<int>(rep.richardson_orders.size()) - 1; j >= 0; --j) {
      if (rep.richardson_dist[j + 1] > floor) {
        rep.temporal_order = rep.richardson_orders[j];
        rep.temporal_pair_used = j;
        break;
      }
    }
  }

  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return rep;
}

std::string converge_report_json(const ConvergeReport& r) {
  nlohmann::ordered_json j;
  auto cells = [](const std::vector<SweepCell>& v) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& c : v) {
      arr.push_back({{"n", c.n},
                     {"eps", c.eps},
                     {"status", c.status},
                     {"dist", c.dist},
                     {"steps", c.steps}});
    }
    return arr;
  };
  j["spatial"] = cells(r.spatial);
  j["spatial_orders"] = r.spatial_orders;
  j["spatial_ok"] = r.spatial_ok;
  j["spatial_floor"] = r.spatial_floor;
  j["epsilon"] = cells(r.epsilon);
  j["eps_monotone"] = r.eps_monotone;
  j["richardson_dt"] = r.richardson_dt;
  j["richardson_dist"] = r.richardson_dist;
  j["richardson_orders"] = r.richardson_orders;
  j["temporal_order"] = r.temporal_order;
  j["temporal_pair_used"] = r.temporal_pair_used;
  j["wall_seconds"] = r.wall_seconds;
  return j.dump(2) + "\n";
}

}  // namespace mrelax
