#include "mrelax/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "mrelax/errors.hpp"
#include "mrelax/relaxvars.hpp"

namespace mrelax {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int exit_code_for(HaltCause h) {
  switch (h) {
    case HaltCause::completed: return 0;
    case HaltCause::vacuum_breach: return 3;
    case HaltCause::stiffness_collapse: return 4;
    case HaltCause::eval_error: return 5;
  }
  return 1;
}

namespace {

double relative_drift(const std::vector<RecordPoint>& recs, double (*get)(const DiagnosticsRecord&)) {
  if (recs.empty()) return 0.0;
  const double v0 = get(recs.front().rec);
  const double scale = std::max(std::abs(v0), 1.0);
  double worst = 0.0;
  for (const auto& rp : recs) worst = std::max(worst, std::abs(get(rp.rec) - v0) / scale);
  return worst;
}

int smallest_mode(const RunConfig& cfg) {
  int k1 = 0;
  for (const auto& m : cfg.initial.rho_pert) k1 = k1 == 0 ? m.mode : std::min(k1, m.mode);
  for (const auto& m : cfg.initial.b_pert) k1 = k1 == 0 ? m.mode : std::min(k1, m.mode);
  return k1 == 0 ? 1 : k1;
}

DecayFitSummary fit_series(const std::string& name, const std::vector<RecordPoint>& recs,
                           double (*get)(const DiagnosticsRecord&)) {
  DecayFitSummary out;
  out.series = name;
  std::vector<double> t, v;
  t.reserve(recs.size());
  v.reserve(recs.size());
  for (const auto& rp : recs) {
    t.push_back(rp.time);
    v.push_back(get(rp.rec));
  }
  const auto window = default_decay_window(t, v);
  if (!window) {
    out.error = "series never enters the [1e-8, 1e-2] fit window";
    return out;
  }
  try {
    const DecayFit fit = fit_decay(t, v, window->first, window->second);
    out.ok = true;
    out.rate = fit.rate;
    out.r_squared = fit.r_squared;
    out.t_lo = fit.t_lo;
    out.t_hi = fit.t_hi;
    out.n_used = fit.n_used;
  } catch (const FitError& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace

RunArtifacts execute_run(const RunConfig& cfg) {
  validate_config(cfg);
  const State s0 = build_initial_state(cfg);

  ObserverConfig obs;
  obs.cadence = cfg.cadence;
  obs.snapshot_times = cfg.output.snapshot_times;
  obs.diag.s_list = cfg.s_list;
  obs.diag.reference = std::make_pair(cfg.initial.rho_mean, cfg.initial.b_mean);

  RunArtifacts art;
  art.trajectory = run(s0, cfg.params, cfg.step, obs);

  const Trajectory& traj = art.trajectory;
  RunSummary& sum = art.summary;
  sum.tag = cfg.tag;
  sum.halt = traj.halt;
  sum.halt_message = traj.halt_message;
  sum.halt_time = traj.halt_time;
  sum.halt_index = traj.halt_index;
  sum.steps = traj.steps;
  sum.wall_seconds = traj.wall_seconds;

  const auto& recs = traj.records;
  if (recs.empty()) return art;

  sum.mass_drift_rel = relative_drift(recs, [](const DiagnosticsRecord& r) { return r.mass; });
  sum.flux_drift_rel = relative_drift(recs, [](const DiagnosticsRecord& r) { return r.flux_mean; });

  const double e0 = recs.front().rec.energy;
  double worst_inc = 0.0, worst_w = 0.0, worst_z = 0.0;
  for (std::size_t k = 0; k + 1 < recs.size(); ++k) {
    const auto& a = recs[k].rec;
    const auto& b = recs[k + 1].rec;
    worst_inc = std::max(worst_inc, (b.energy - a.energy) / std::abs(e0));
    if (!a.all_w_infinite && !b.all_w_infinite) {
      const double scale = std::max({1.0, std::abs(a.min_w), std::abs(b.min_w)});
      worst_w = std::max(worst_w, (a.min_w - b.min_w) / scale);
    }
    if (!a.all_z_infinite && !b.all_z_infinite) {
      const double scale = std::max({1.0, std::abs(a.min_z), std::abs(b.min_z)});
      worst_z = std::max(worst_z, (a.min_z - b.min_z) / scale);
    }
  }
  sum.energy_increase_rel = worst_inc;
  sum.min_w_drop_rel = worst_w;
  sum.min_z_drop_rel = worst_z;

  double min_minz = std::numeric_limits<double>::infinity();
  double minr = recs.front().rec.min_rho, maxr = recs.front().rec.max_rho,
         maxb = recs.front().rec.max_abs_b;
  for (const auto& rp : recs) {
    min_minz = std::min(min_minz, rp.rec.min_z);
    minr = std::min(minr, rp.rec.min_rho);
    maxr = std::max(maxr, rp.rec.max_rho);
    maxb = std::max(maxb, rp.rec.max_abs_b);
  }
  sum.max_Z = std::exp(-min_minz);
  sum.min_rho_run = minr;
  sum.max_rho_run = maxr;
  sum.max_abs_b_run = maxb;

  // Central difference of the baseline-subtracted energy against -dissipation.
  double worst_fd = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 1; k + 1 < recs.size(); ++k) {
    const double d = recs[k].rec.dissipation;
    if (!(d > 1e-8)) continue;
    const double span = recs[k + 1].time - recs[k - 1].time;
    if (!(span > 0.0)) continue;
    const double fd = (recs[k + 1].rec.energy_dev - recs[k - 1].rec.energy_dev) / span;
    const double rel = std::abs(fd + d) / d;
    if (std::isnan(worst_fd) || rel > worst_fd) worst_fd = rel;
  }
  sum.fd_energy_match_max_rel_err = worst_fd;

  if (cfg.initial.b_mean == 0.0) {
    sum.fits.push_back(
        fit_series("l2_rho_dev", recs, [](const DiagnosticsRecord& r) { return r.l2_rho_dev; }));
    sum.fits.push_back(
        fit_series("l2_b_dev", recs, [](const DiagnosticsRecord& r) { return r.l2_b_dev; }));
  } else {
    sum.fits.push_back(
        fit_series("coupled1", recs, [](const DiagnosticsRecord& r) { return r.coupled1; }));
    sum.fits.push_back(
        fit_series("coupled2", recs, [](const DiagnosticsRecord& r) { return r.coupled2; }));
  }

  const double alpha = relaxvars::eval_alpha(cfg.initial.rho_mean, cfg.initial.b_mean, cfg.params);
  const double beta = relaxvars::eval_beta(cfg.initial.rho_mean, cfg.initial.b_mean, cfg.params);
  const int k1 = smallest_mode(cfg);
  const double kappa = k1 * kTwoPi / cfg.length;
  sum.rate_reference_linearized = 2.0 * std::min(alpha, beta) * kappa * kappa;
  return art;
}

void write_series_csv(const std::string& path, const Trajectory& traj,
                      const std::vector<int>& s_list) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open series output '" + path + "'");
  out << "t,mass,flux_mean,energy,dissipation,min_rho,max_rho,max_abs_b,min_w,min_z,"
         "l2_rho_dev,l2_b_dev";
  for (int s : s_list) out << ",hs" << s << "_rho,hs" << s << "_b";
  out << ",coupled1,coupled2,dt\n";
  for (const auto& rp : traj.records) {
    const auto& r = rp.rec;
    out << format_g17(r.time) << ',' << format_g17(r.mass) << ',' << format_g17(r.flux_mean)
        << ',' << format_g17(r.energy) << ',' << format_g17(r.dissipation) << ','
        << format_g17(r.min_rho) << ',' << format_g17(r.max_rho) << ',' << format_g17(r.max_abs_b)
        << ',' << format_g17(r.min_w) << ',' << format_g17(r.min_z) << ','
        << format_g17(r.l2_rho_dev) << ',' << format_g17(r.l2_b_dev);
    for (std::size_t j = 0; j < s_list.size(); ++j) {
      out << ',' << format_g17(j < r.hs_rho.size() ? r.hs_rho[j] : 0.0) << ','
          << format_g17(j < r.hs_b.size() ? r.hs_b[j] : 0.0);
    }
    out << ',' << format_g17(r.coupled1) << ',' << format_g17(r.coupled2) << ','
        << format_g17(r.dt_used) << '\n';
  }
}

void write_snapshots(const std::string& prefix, const Trajectory& traj, const Params& p) {
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const Snapshot& snap = traj.snapshots[k];
    char name[32];
    std::snprintf(name, sizeof name, "_%03zu.csv", k);
    std::ofstream out(prefix + name);
    if (!out) throw ConfigError("cannot open snapshot output '" + prefix + name + "'");
    const Velocity v = velocity(snap.state, p);
    out << "x,rho,b,ux,uz\n";
    const Grid& g = snap.state.rho.grid();
    for (std::size_t i = 0; i < g.n; ++i) {
      out << format_g17(g.points[i]) << ',' << format_g17(snap.state.rho[i]) << ','
          << format_g17(snap.state.b[i]) << ',' << format_g17(v.ux[i]) << ','
          << format_g17(v.uz[i]) << '\n';
    }
  }
}

std::string summary_to_json(const RunConfig& cfg, const RunSummary& s) {
  nlohmann::ordered_json j;
  j["scenario"] = s.tag;
  j["halting_cause"] = halt_cause_name(s.halt);
  j["halt_message"] = s.halt_message;
  j["halt_time"] = s.halt_time;
  j["halt_index"] = s.halt_index;
  j["exit_code"] = exit_code_for(s.halt);
  j["steps"] = s.steps;
  j["wall_seconds"] = s.wall_seconds;
  j["grid_n"] = cfg.n;
  j["gamma"] = cfg.params.gamma;
  j["b0"] = cfg.params.b0;
  j["epsilon"] = cfg.params.epsilon;
  j["rho_bar"] = cfg.initial.rho_mean;
  j["b_bar"] = cfg.initial.b_mean;
  j["conservation"] = {{"mass_drift_rel", s.mass_drift_rel},
                       {"flux_mean_drift_rel", s.flux_drift_rel}};
  j["monotonicity"] = {{"energy_increase_rel", s.energy_increase_rel},
                       {"min_w_drop_rel", s.min_w_drop_rel},
                       {"min_z_drop_rel", s.min_z_drop_rel},
                       {"max_Z", s.max_Z}};
  j["fd_energy_match_max_rel_err"] = s.fd_energy_match_max_rel_err;
  j["envelopes"] = {{"min_rho", s.min_rho_run},
                    {"max_rho", s.max_rho_run},
                    {"max_abs_b", s.max_abs_b_run}};
  nlohmann::ordered_json fits = nlohmann::ordered_json::array();
  for (const auto& f : s.fits) {
    nlohmann::ordered_json jf;
    jf["series"] = f.series;
    jf["ok"] = f.ok;
    if (f.ok) {
      jf["rate"] = f.rate;
      jf["r_squared"] = f.r_squared;
      jf["window"] = {f.t_lo, f.t_hi};
      jf["n_used"] = f.n_used;
    } else {
      jf["error"] = f.error;
    }
    fits.push_back(jf);
  }
  j["decay_fits"] = fits;
  j["rate_reference_2_min_alpha_beta_k1sq"] = s.rate_reference_linearized;
  return j.dump(2) + "\n";
}

void write_summary_json(const std::string& path, const RunConfig& cfg, const RunSummary& summary) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open summary output '" + path + "'");
  out << summary_to_json(cfg, summary);
}

void write_level_csv(const std::string& path, const std::vector<relaxvars::LevelPoint>& table) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open level output '" + path + "'");
  out << "rho,b,value,branch\n";
  for (const auto& pt : table) {
    out << format_g17(pt.rho) << ',' << format_g17(pt.b) << ',' << format_g17(pt.value) << ','
        << pt.branch << '\n';
  }
}

}  // namespace mrelax
