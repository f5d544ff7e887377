#include "mrelax/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mrelax/errors.hpp"
#include "mrelax/relaxvars.hpp"

namespace mrelax {

double energy(const State& s, const Params& p) {
  const double c = 1.0 / (p.gamma * (p.gamma - 1.0));
  double acc = 0.0;
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    acc += c * pow_gamma(s.rho[i], p.gamma) + 0.5 * s.b[i] * s.b[i];
  }
  return acc * s.rho.grid().dx;
}

double dissipation(const State& s, const Params& p) {
  const Field rho_x = deriv(s.rho, 1);
  const Field b_x = deriv(s.b, 1);
  double acc = 0.0;
  for (std::size_t i = 0; i < s.rho.size(); ++i) {
    const double r = s.rho[i];
    const double inv_sqrt_r = 1.0 / std::sqrt(r);
    const double t1 = pow_gamma(r, p.gamma - 1.5) * rho_x[i] + s.b[i] * inv_sqrt_r * b_x[i];
    const double t2 = p.b0 * inv_sqrt_r * b_x[i];
    acc += t1 * t1 + t2 * t2;
  }
  return acc * s.rho.grid().dx;
}

namespace {

// rho^gamma - rho_bar^gamma without losing the small difference.
inline double pow_gamma_diff(double rho, double rho_bar, double gamma) {
  return pow_gamma(rho_bar, gamma) * std::expm1(gamma * std::log1p((rho - rho_bar) / rho_bar));
}

}  // namespace

DiagnosticsRecord record(const State& s, const Params& p, const DiagnosticsOptions& opt,
                         double dt_used) {
  DiagnosticsRecord r;
  r.time = s.time;
  r.dt_used = dt_used;
  r.mass = mean(s.rho);
  r.flux_mean = mean(s.b);
  r.energy = energy(s, p);
  r.dissipation = dissipation(s, p);

  const double rho_bar = opt.reference ? opt.reference->first : r.mass;
  const double b_bar = opt.reference ? opt.reference->second : r.flux_mean;
  if (!(rho_bar > 0.0)) throw ConfigError("record: reference density must be positive");

  const std::size_t n = s.rho.size();
  const double dx = s.rho.grid().dx;
  const double ec = 1.0 / (p.gamma * (p.gamma - 1.0));
  double edev = 0.0;
  double minr = s.rho[0], maxr = s.rho[0], maxab = std::abs(s.b[0]);
  double l2r = 0.0, l2b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double rr = s.rho[i];
    const double bb = s.b[i];
    minr = std::min(minr, rr);
    maxr = std::max(maxr, rr);
    maxab = std::max(maxab, std::abs(bb));
    edev += ec * pow_gamma_diff(rr, rho_bar, p.gamma) + 0.5 * (bb - b_bar) * (bb + b_bar);
    l2r += (rr - rho_bar) * (rr - rho_bar);
    l2b += (bb - b_bar) * (bb - b_bar);
  }
  r.energy_dev = edev * dx;
  r.min_rho = minr;
  r.max_rho = maxr;
  r.max_abs_b = maxab;
  r.l2_rho_dev = std::sqrt(dx * l2r);
  r.l2_b_dev = std::sqrt(dx * l2b);

  // Pointwise relaxation-variable minima; branch-infinite points contribute
  // +inf and only matter when the whole grid is on the branch set.
  double minw = std::numeric_limits<double>::infinity();
  double minz = std::numeric_limits<double>::infinity();
  bool any_w_finite = false, any_z_finite = false;
  for (std::size_t i = 0; i < n; ++i) {
    try {
      const relaxvars::ExtReal w = relaxvars::eval_w(s.rho[i], s.b[i], p, opt.quad);
      if (!w.infinite) {
        any_w_finite = true;
        minw = std::min(minw, w.value);
      }
      const relaxvars::ExtReal z = relaxvars::eval_z(s.rho[i], s.b[i], p, opt.quad);
      if (!z.infinite) {
        any_z_finite = true;
        minz = std::min(minz, z.value);
      }
    } catch (const QuadratureError& e) {
      throw QuadratureError(std::string(e.what()) + " (grid index " + std::to_string(i) +
                            ", t = " + std::to_string(s.time) + ")");
    }
  }
  r.min_w = minw;
  r.min_z = minz;
  r.all_w_infinite = !any_w_finite;
  r.all_z_infinite = !any_z_finite;

  if (!opt.s_list.empty()) {
    Field rho_dev(s.rho.grid_ptr()), b_dev(s.rho.grid_ptr());
    for (std::size_t i = 0; i < n; ++i) {
      rho_dev[i] = s.rho[i] - rho_bar;
      b_dev[i] = s.b[i] - b_bar;
    }
    for (int sv : opt.s_list) {
      r.hs_rho.push_back(sobolev_seminorm(rho_dev, sv));
      r.hs_b.push_back(sobolev_seminorm(b_dev, sv));
    }
  }

  if (opt.reference && b_bar != 0.0) {
    const relaxvars::ZetaPair zp = relaxvars::zeta_roots(rho_bar, b_bar, p);
    double c1 = 0.0, c2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dr = s.rho[i] - rho_bar;
      const double db = s.b[i] - b_bar;
      const double v1 = zp.zeta1 * dr + db;
      const double v2 = zp.zeta2 * dr + db;
      c1 += v1 * v1;
      c2 += v2 * v2;
    }
    r.coupled1 = std::sqrt(dx * c1);
    r.coupled2 = std::sqrt(dx * c2);
  }
  return r;
}

DecayFit fit_decay(std::span<const double> times, std::span<const double> values, double t_lo,
                   double t_hi) {
  if (times.size() != values.size()) throw FitError("fit_decay: length mismatch");
  if (!(t_lo <= t_hi)) throw FitError("fit_decay: empty window");
  std::vector<double> ts, ys;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_lo || times[i] > t_hi) continue;
    if (!(values[i] > 1e-12)) continue;  // roundoff floor
    ts.push_back(times[i]);
    ys.push_back(std::log(values[i]));
  }
  if (ts.size() < 10) throw FitError("fit_decay: fewer than 10 usable samples in window");
  const double m = static_cast<double>(ts.size());
  double st = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    st += ts[i];
    sy += ys[i];
  }
  const double tbar = st / m, ybar = sy / m;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double dt = ts[i] - tbar;
    const double dy = ys[i] - ybar;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  DecayFit fit;
  fit.t_lo = ts.front();
  fit.t_hi = ts.back();
  fit.n_used = static_cast<int>(ts.size());
  if (stt == 0.0) throw FitError("fit_decay: degenerate time window");
  const double slope = sty / stt;
  fit.rate = -slope;
  if (syy <= 0.0) {
    fit.r_squared = 1.0;  // constant series: exact fit with rate 0
  } else {
    fit.r_squared = (sty * sty) / (stt * syy);
  }
  return fit;
}

std::optional<std::pair<double, double>> default_decay_window(std::span<const double> times,
                                                              std::span<const double> values) {
  double lo = std::numeric_limits<double>::quiet_NaN();
  double hi = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (values[i] <= 1e-2 && values[i] >= 1e-8) {
      if (std::isnan(lo)) lo = times[i];
      hi = times[i];
    }
  }
  if (std::isnan(lo)) return std::nullopt;
  return std::make_pair(lo, hi);
}

}  // namespace mrelax
