// Acceptance suite: runs the certification scenarios end to end and prints
// one PASS/FAIL line per criterion. Exit status is nonzero if any criterion
// fails. Expected total runtime is a few minutes on one core.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "mrelax/audit.hpp"
#include "mrelax/converge.hpp"
#include "mrelax/relaxvars.hpp"
#include "mrelax/runner.hpp"

using namespace mrelax;

namespace {

struct Criterion {
  int num;
  std::string name;
  bool pass;
  std::string detail;
};

std::vector<Criterion> results;

void report(int num, const std::string& name, bool pass, const std::string& detail) {
  results.push_back({num, name, pass, detail});
  std::printf("%s criterion %d (%s): %s\n", pass ? "PASS" : "FAIL", num, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// every recorded scalar must be a number (positive infinity is legitimate for
// the branch-set minima); silent NaN propagation is an acceptance failure
bool records_clean(const Trajectory& traj, bool coupled_expected) {
  for (const auto& rp : traj.records) {
    const auto& r = rp.rec;
    for (double v : {r.mass, r.flux_mean, r.energy, r.dissipation, r.min_rho, r.max_rho,
                     r.max_abs_b, r.l2_rho_dev, r.l2_b_dev, r.dt_used}) {
      if (!std::isfinite(v)) return false;
    }
    if (std::isnan(r.min_w) || std::isnan(r.min_z)) return false;
    if (coupled_expected && (std::isnan(r.coupled1) || std::isnan(r.coupled2))) return false;
  }
  return true;
}

const DecayFitSummary* find_fit(const RunSummary& s, const std::string& name) {
  for (const auto& f : s.fits)
    if (f.series == name) return &f;
  return nullptr;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();

  std::printf("running scenarios...\n");
  const RunConfig cfg_b0 = builtin_scenario("relax-b0");
  const RunArtifacts b0 = execute_run(cfg_b0);
  std::printf("  relax-b0   n=128: %s, %ld steps, %.1fs\n",
              halt_cause_name(b0.summary.halt).c_str(), b0.summary.steps,
              b0.summary.wall_seconds);

  RunConfig cfg_b0_64 = cfg_b0;
  cfg_b0_64.n = 64;
  const RunArtifacts b0c = execute_run(cfg_b0_64);
  std::printf("  relax-b0   n= 64: %s, %ld steps, %.1fs\n",
              halt_cause_name(b0c.summary.halt).c_str(), b0c.summary.steps,
              b0c.summary.wall_seconds);

  const RunConfig cfg_bb = builtin_scenario("relax-bbar");
  const RunArtifacts bb = execute_run(cfg_bb);
  std::printf("  relax-bbar n=128: %s, %ld steps, %.1fs\n",
              halt_cause_name(bb.summary.halt).c_str(), bb.summary.steps,
              bb.summary.wall_seconds);

  const RunConfig cfg_probe = builtin_scenario("probe-vacuum");
  const RunArtifacts probe = execute_run(cfg_probe);
  std::printf("  probe      n=128: %s, %ld steps, %.1fs\n\n",
              halt_cause_name(probe.summary.halt).c_str(), probe.summary.steps,
              probe.summary.wall_seconds);

  const bool runs_completed =
      b0.summary.halt == HaltCause::completed && bb.summary.halt == HaltCause::completed;

  // 1 -- conservation: relative drift of mean rho and mean B at most 1e-11
  {
    const double m = b0.summary.mass_drift_rel;
    const double f = b0.summary.flux_drift_rel;
    report(1, "conservation", runs_completed && m <= 1e-11 && f <= 1e-11,
           "relax-b0 mass drift " + fmt(m) + ", flux-mean drift " + fmt(f) + " (tol 1e-11)");
  }

  // 2 -- energy dissipation: E non-increasing within 1e-9 E(0); central
  //      difference of E matches -dissipation to 1e-4 where dissipation > 1e-8
  {
    const double inc = b0.summary.energy_increase_rel;
    const double fd = b0.summary.fd_energy_match_max_rel_err;
    const bool ok = runs_completed && inc <= 1e-9 && std::isfinite(fd) && fd <= 1e-4;
    report(2, "energy dissipation", ok,
           "worst E increase " + fmt(inc) + " of E(0) (tol 1e-9); dE/dt vs -dissipation " +
               fmt(fd) + " rel (tol 1e-4)");
  }

  // 3 -- maximum principles: min_x w and min_x z non-decreasing within 1e-6
  //      relative on both runs; max_x Z < 1 at every record
  {
    bool z_ceiling = true;
    for (const auto* art : {&b0, &bb}) {
      for (const auto& rp : art->trajectory.records) {
        // max_x Z = exp(-min_x z); on an all-branch-set grid it is 0
        if (!rp.rec.all_z_infinite && !(rp.rec.min_z > 0.0)) z_ceiling = false;
      }
    }
    const double worst = std::max({b0.summary.min_w_drop_rel, b0.summary.min_z_drop_rel,
                                   bb.summary.min_w_drop_rel, bb.summary.min_z_drop_rel});
    report(3, "maximum principles", runs_completed && worst <= 1e-6 && z_ceiling,
           "worst min_w/min_z drop " + fmt(worst) + " rel (tol 1e-6); max Z < 1 " +
               (z_ceiling ? "holds" : "violated"));
  }

  // 4 -- no vacuum: min rho stays above half its initial value on both
  //      scenario runs; the large-amplitude probe either completes positive
  //      or halts with an explicit breach report; no NaN in any series
  {
    const double floor_b0 = 0.5 * b0.trajectory.records.front().rec.min_rho;
    const double floor_bb = 0.5 * bb.trajectory.records.front().rec.min_rho;
    const bool envelopes_ok =
        b0.summary.min_rho_run > floor_b0 && bb.summary.min_rho_run > floor_bb;
    const bool probe_ok =
        (probe.summary.halt == HaltCause::completed && probe.summary.min_rho_run > 0.0) ||
        (probe.summary.halt == HaltCause::vacuum_breach && !probe.summary.halt_message.empty());
    const bool no_nan = records_clean(b0.trajectory, false) && records_clean(bb.trajectory, true) &&
                        records_clean(probe.trajectory, false);
    report(4, "no vacuum", runs_completed && envelopes_ok && probe_ok && no_nan,
           "min rho " + fmt(b0.summary.min_rho_run) + "/" + fmt(bb.summary.min_rho_run) +
               " vs floors " + fmt(floor_b0) + "/" + fmt(floor_bb) + "; probe " +
               halt_cause_name(probe.summary.halt) + " (min rho " +
               fmt(probe.summary.min_rho_run) + "); NaN-free " + (no_nan ? "yes" : "NO"));
  }

  // 5 -- relaxation: log-linear fits with R^2 > 0.999; rates at n=64 vs n=128
  //      agree within 5%; coupled-norm fits for the b_bar != 0 scenario
  {
    bool ok = runs_completed && b0c.summary.halt == HaltCause::completed;
    std::string detail;
    const char* series_b0[] = {"l2_rho_dev", "l2_b_dev"};
    for (const char* name : series_b0) {
      const auto* f128 = find_fit(b0.summary, name);
      const auto* f64 = find_fit(b0c.summary, name);
      if (!f128 || !f64 || !f128->ok || !f64->ok) {
        ok = false;
        detail += std::string(name) + " fit missing; ";
        continue;
      }
      const double agree = std::abs(f64->rate - f128->rate) / std::abs(f128->rate);
      if (!(f128->r_squared > 0.999) || !(agree <= 0.05)) ok = false;
      detail += std::string(name) + " rate " + fmt(f128->rate) + " R2 " +
                fmt(f128->r_squared) + " x-res " + fmt(agree) + "; ";
    }
    const char* series_bb[] = {"coupled1", "coupled2"};
    for (const char* name : series_bb) {
      const auto* f = find_fit(bb.summary, name);
      if (!f || !f->ok) {
        ok = false;
        detail += std::string(name) + " fit missing; ";
        continue;
      }
      if (!(f->r_squared > 0.999)) ok = false;
      detail += std::string(name) + " rate " + fmt(f->rate) + " R2 " + fmt(f->r_squared) + "; ";
    }
    report(5, "relaxation", ok, detail);
  }

  // 6 -- derivative/identity/quadrature audit at defaults
  {
    const auto tA = std::chrono::steady_clock::now();
    const AuditReport audit = run_audit(Params{1.5, 1.0, 0.0}, AuditOptions{});
    double worst = 0.0;
    std::string failing;
    for (const auto& c : audit.checks) {
      if (c.name.rfind("fd_", 0) == 0) worst = std::max(worst, c.max_err);
      if (!c.pass) failing += c.name + " ";
    }
    report(6, "derivative audit", audit.pass,
           audit.pass ? "all checks pass (worst FD err " + fmt(worst) + ", " +
                            fmt(elapsed(tA)) + "s)"
                      : "failing: " + failing);
  }

  // 7 -- level-set geometry at gamma=1.5, b0=1 on a dyadic lattice through (1,0)
  {
    using namespace relaxvars;
    const Params p{1.5, 1.0, 0.0};
    const int n_rho = 49, n_b = 65;
    const double rho_lo = 0.25, rho_hi = 3.25, b_lo = -2.0, b_hi = 2.0;
    const auto tw = level_grid(p, rho_lo, rho_hi, n_rho, b_lo, b_hi, n_b, LevelWhich::W);
    const auto tz = level_grid(p, rho_lo, rho_hi, n_rho, b_lo, b_hi, n_b, LevelWhich::Z);

    // sublevel thresholds from a reference state where both are representable
    const double W0 = eval_W(1.05, 1.0, p);
    const double Z0 = eval_Z(1.05, 1.0, p);

    bool w_nonempty = false, w_bounded = true;
    int singular_count = 0;
    double singular_rho = -1.0, singular_b = -1.0;
    for (std::size_t i = 0; i < tw.size(); ++i) {
      const auto& pt = tw[i];
      const bool member = pt.branch == 1 || (pt.branch == 0 && pt.value <= W0);
      if (member) {
        w_nonempty = true;
        // bounded above in rho and |B|: no member on those box faces
        if (pt.rho == rho_hi || pt.b == b_lo || pt.b == b_hi) w_bounded = false;
      }
      if (pt.branch == 1 && tz[i].branch == 1) {
        ++singular_count;
        singular_rho = pt.rho;
        singular_b = pt.b;
      }
    }

    bool z_nonempty = false;
    double rho_z0 = rho_hi;
    for (const auto& pt : tz) {
      const bool member = pt.branch == 1 || (pt.branch == 0 && pt.value <= Z0);
      if (member) {
        z_nonempty = true;
        rho_z0 = std::min(rho_z0, pt.rho);
      }
    }
    const bool z_strip = z_nonempty && rho_z0 > rho_lo;

    const bool singular_ok = singular_count == 1 && singular_rho == 1.0 && singular_b == 0.0;
    report(7, "level-set geometry", w_nonempty && w_bounded && z_strip && singular_ok,
           std::string("{W<=W0} bounded above in rho,|B| ") + (w_bounded ? "yes" : "NO") +
               "; {Z<=Z0} excludes rho < " + fmt(rho_z0) + " (> rho_lo " + fmt(rho_lo) +
               "); branch-singular point at (" + fmt(singular_rho) + "," + fmt(singular_b) +
               ") x" + std::to_string(singular_count));
  }

  // 8 -- scheme verification: temporal order >= 3.8, spectral spatial decay,
  //      monotone epsilon distances, sweep within its runtime budget
  {
    const auto tC = std::chrono::steady_clock::now();
    const ConvergeReport rep = run_converge(builtin_scenario("converge-base"));
    const double wall = elapsed(tC);
    const bool ok = rep.temporal_order >= 3.8 && rep.spatial_ok && rep.eps_monotone &&
                    wall <= 600.0;
    std::string orders;
    for (double o : rep.spatial_orders) orders += fmt(o) + " ";
    report(8, "scheme verification", ok,
           "temporal order " + fmt(rep.temporal_order) + " (>= 3.8); spatial orders " + orders +
               (rep.spatial_ok ? "(super-4th)" : "(NOT super-4th)") + "; eps distances " +
               (rep.eps_monotone ? "monotone" : "NOT monotone") + "; sweep " + fmt(wall) + "s");
  }

  int failures = 0;
  for (const auto& c : results)
    if (!c.pass) ++failures;
  std::printf("\n%d/%zu criteria passed (total %.1fs)\n",
              static_cast<int>(results.size()) - failures, results.size(), elapsed(t0));
  return failures == 0 ? 0 : 1;
}
