#include "mrelax/relaxvars.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "mrelax/errors.hpp"
#include "mrelax/threads.hpp"

namespace mrelax {
namespace relaxvars {
namespace {

constexpr double kTailCut = 16.0;  // integral arguments beyond this use the series tail

struct Core {
  double rho_gamma;  // rho^gamma
  double D;          // b^2 + b0^2 - rho^gamma
  double E;          // b^2 - b0^2 + rho^gamma
  double S;          // sqrt(D^2 + 4 b^2 rho^gamma) = sqrt(E^2 + 4 b^2 b0^2)
};

Core core(double rho, double b, const Params& p) {
  if (!(rho > 0.0)) throw ConfigError("relaxvars: rho must be positive");
  Core c;
  c.rho_gamma = pow_gamma(rho, p.gamma);
  const double b0sq = p.b0 * p.b0;
  c.D = b * b + b0sq - c.rho_gamma;
  c.E = b * b - b0sq + c.rho_gamma;
  c.S = std::sqrt(c.D * c.D + 4.0 * b * b * c.rho_gamma);
  return c;
}

// (hi^p - lo^p)/p with the p -> 0 limit ln(hi/lo), via expm1 for stability.
double power_difference_over_p(double p, double lo, double hi) {
  const double L = std::log(hi / lo);
  const double x = p * L;
  double e1;
  if (x == 0.0) {
    e1 = 1.0;
  } else {
    e1 = std::expm1(x) / x;
  }
  return std::pow(lo, p) * L * e1;
}

// Integral of s^a / (1 - sgn*s/2)^2 over [lo, hi] with lo >= kTailCut, via the
// exact expansion 1/(1 - sgn*s/2)^2 = (4/s^2) * sum_m (m+1) (sgn*2/s)^m.
// sgn = +1 reproduces the w-integrand denominator (1 - s/2)^2, sgn = -1 the
// z-integrand denominator (1 + s/2)^2.
double tail_integral(double a, double lo, double hi, int sgn) {
  double sum = 0.0;
  double coeff = 4.0;  // 4 * (sgn*2)^m, updated per term
  int small_streak = 0;
  for (int m = 0; m < 80; ++m) {
    const double term = coeff * (m + 1) * power_difference_over_p(a - 1.0 - m, lo, hi);
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) {
      if (++small_streak >= 3) return sum;
    } else {
      small_streak = 0;
    }
    coeff *= 2.0 * sgn;
  }
  return sum;  // ratio 2/lo <= 1/8 makes 80 terms overkill already
}

double w_exponent(const Params& p) { return 2.0 / (2.0 - p.gamma); }          // K
double w_tail_exponent(const Params& p) { return p.gamma / (2.0 - p.gamma); }  // K - 1

}  // namespace

ExtReal eval_f(double rho, double b, const Params& p) {
  const Core c = core(rho, b, p);
  const double b0sq = p.b0 * p.b0;
  if (b == 0.0) {
    if (c.rho_gamma <= b0sq) return ExtReal::inf();
    return ExtReal::of(2.0 * c.rho_gamma / (c.rho_gamma - b0sq));
  }
  // Pick the branch of the algebraically equal forms that adds positives.
  if (c.D >= 0.0) return ExtReal::of((c.D + c.S) / (b * b));
  return ExtReal::of(4.0 * c.rho_gamma / (c.S - c.D));
}

ExtReal eval_g(double rho, double b, const Params& p) {
  const Core c = core(rho, b, p);
  const double b0sq = p.b0 * p.b0;
  if (b == 0.0) {
    if (c.rho_gamma >= b0sq) return ExtReal::inf();
    return ExtReal::of(2.0 * c.rho_gamma / (b0sq - c.rho_gamma));
  }
  if (c.D >= 0.0) return ExtReal::of(4.0 * c.rho_gamma / (c.S + c.D));
  return ExtReal::of((c.S - c.D) / (b * b));
}

ExtReal eval_w(double rho, double b, const Params& p, const QuadOptions& q) {
  const ExtReal f = eval_f(rho, b, p);
  if (f.infinite) return ExtReal::inf();
  const double K = w_exponent(p);
  const double a = w_tail_exponent(p);
  const double cint = 2.0 * p.b0 * p.b0 / (2.0 - p.gamma);
  const double bb = b * b;
  const double b0sq = p.b0 * p.b0;
  const double fv = f.value;
  if (fv <= 4.0) {
    // original closed form: (b^2+b0^2) f^K - int_f^4 (1-s/4)/(1-s/2)^2 s^K ds
    auto integrand = [K](double s) {
      const double d = 1.0 - 0.5 * s;
      return (1.0 - 0.25 * s) / (d * d) * std::pow(s, K);
    };
    const double I = integrate(integrand, fv, 4.0, q);
    return ExtReal::of((bb + b0sq) * std::pow(fv, K) - cint * I);
  }
  // rewritten form: b^2 f^K + 4^K b0^2 + int_4^f s^(K-1)/(1-s/2)^2 ds
  auto integrand = [a](double s) {
    const double d = 1.0 - 0.5 * s;
    return std::pow(s, a) / (d * d);
  };
  double J;
  if (fv <= kTailCut) {
    J = integrate(integrand, 4.0, fv, q);
  } else {
    J = integrate(integrand, 4.0, kTailCut, q) + tail_integral(a, kTailCut, fv, +1);
  }
  return ExtReal::of(bb * std::pow(fv, K) + std::pow(4.0, K) * b0sq + cint * J);
}

ExtReal eval_z(double rho, double b, const Params& p, const QuadOptions& q) {
  const ExtReal g = eval_g(rho, b, p);
  if (g.infinite) return ExtReal::inf();
  const double K = w_exponent(p);
  const double a = w_tail_exponent(p);
  const double cint = 2.0 * p.b0 * p.b0 / (2.0 - p.gamma);
  const double gv = g.value;
  auto integrand = [a](double s) {
    const double d = 1.0 + 0.5 * s;
    return std::pow(s, a) / (d * d);
  };
  double J;
  if (gv <= kTailCut) {
    J = integrate(integrand, 0.0, gv, q);
  } else {
    J = integrate(integrand, 0.0, kTailCut, q) + tail_integral(a, kTailCut, gv, -1);
  }
  return ExtReal::of(b * b * std::pow(gv, K) + cint * J);
}

double eval_W(double rho, double b, const Params& p, const QuadOptions& q) {
  const ExtReal w = eval_w(rho, b, p, q);
  return w.infinite ? 0.0 : std::exp(-w.value);
}

double eval_Z(double rho, double b, const Params& p, const QuadOptions& q) {
  const ExtReal z = eval_z(rho, b, p, q);
  return z.infinite ? 0.0 : std::exp(-z.value);
}

double eval_alpha(double rho, double b, const Params& p) {
  const ExtReal f = eval_f(rho, b, p);
  const double base = (b * b + p.b0 * p.b0) / rho;
  if (f.infinite) return p.b0 * p.b0 / rho;
  return base + 2.0 * pow_gamma(rho, p.gamma - 1.0) / f.value;
}

double eval_beta(double rho, double b, const Params& p) {
  const ExtReal g = eval_g(rho, b, p);
  const double b0sq_over_rho = p.b0 * p.b0 / rho;
  if (g.infinite) return b0sq_over_rho;
  return b0sq_over_rho * g.value / (g.value + 2.0);
}

RelaxPoint eval_point(double rho, double b, const Params& p, const QuadOptions& q) {
  RelaxPoint pt;
  pt.rho = rho;
  pt.b = b;
  pt.f = eval_f(rho, b, p);
  pt.g = eval_g(rho, b, p);
  pt.w = eval_w(rho, b, p, q);
  pt.z = eval_z(rho, b, p, q);
  pt.bigW = pt.w.infinite ? 0.0 : std::exp(-pt.w.value);
  pt.bigZ = pt.z.infinite ? 0.0 : std::exp(-pt.z.value);
  pt.alpha = eval_alpha(rho, b, p);
  pt.beta = eval_beta(rho, b, p);
  return pt;
}

Grad2 grad_f(double rho, double b, const Params& p) {
  const ExtReal f = eval_f(rho, b, p);
  if (f.infinite) throw ConfigError("grad_f: point is on the infinite branch of f");
  const Core c = core(rho, b, p);
  const double gamma_rg1 = p.gamma * pow_gamma(rho, p.gamma - 1.0);
  double d_rho;
  if (c.E >= 0.0) {
    d_rho = -4.0 * gamma_rg1 * p.b0 * p.b0 / (c.S * (c.S + c.E));
  } else {
    d_rho = -gamma_rg1 * (c.S - c.E) / (c.S * b * b);
  }
  const double d_b = d_rho * b * f.value / gamma_rg1;
  return {d_rho, d_b};
}

Grad2 grad_g(double rho, double b, const Params& p) {
  const ExtReal g = eval_g(rho, b, p);
  if (g.infinite) throw ConfigError("grad_g: point is on the infinite branch of g");
  const Core c = core(rho, b, p);
  const double gamma_rg1 = p.gamma * pow_gamma(rho, p.gamma - 1.0);
  double d_rho;
  if (c.E <= 0.0) {
    d_rho = 4.0 * gamma_rg1 * p.b0 * p.b0 / (c.S * (c.S - c.E));
  } else {
    d_rho = gamma_rg1 * (c.S + c.E) / (c.S * b * b);
  }
  const double d_b = -d_rho * b * g.value / gamma_rg1;
  return {d_rho, d_b};
}

Grad2 grad_w(double rho, double b, const Params& p) {
  const ExtReal f = eval_f(rho, b, p);
  if (f.infinite) throw ConfigError("grad_w: point is on the infinite branch of f");
  const double K = w_exponent(p);
  const double a = w_tail_exponent(p);
  const double c1 = 2.0 * p.gamma / (2.0 - p.gamma);
  return {-2.0 * c1 * pow_gamma(rho, p.gamma - 1.0) * std::pow(f.value, a),
          -c1 * b * std::pow(f.value, K)};
}

Grad2 grad_z(double rho, double b, const Params& p) {
  const ExtReal g = eval_g(rho, b, p);
  if (g.infinite) throw ConfigError("grad_z: point is on the infinite branch of g");
  const double K = w_exponent(p);
  const double a = w_tail_exponent(p);
  const double c1 = 2.0 * p.gamma / (2.0 - p.gamma);
  return {2.0 * c1 * pow_gamma(rho, p.gamma - 1.0) * std::pow(g.value, a),
          -c1 * b * std::pow(g.value, K)};
}

ScaledDerivs scaled_derivs_W(double rho, double b, const Params& p, const QuadOptions& q) {
  const ExtReal f = eval_f(rho, b, p);
  ScaledDerivs d;
  if (f.infinite) {
    d.infinite = true;
    return d;
  }
  const ExtReal w = eval_w(rho, b, p, q);
  d.w = w.value;
  const double K = w_exponent(p);
  const double a = w_tail_exponent(p);
  const double a2 = 2.0 * (p.gamma - 1.0) / (2.0 - p.gamma);
  const double c4 = 4.0 * p.gamma / (2.0 - p.gamma);
  const double c2 = 2.0 * p.gamma / (2.0 - p.gamma);
  const double fv = f.value;
  const double fa = std::pow(fv, a);
  const double fK = std::pow(fv, K);
  const double fa2 = std::pow(fv, a2);
  const double rg1 = pow_gamma(rho, p.gamma - 1.0);
  const double rg2 = pow_gamma(rho, p.gamma - 2.0);
  const Grad2 df = grad_f(rho, b, p);
  // first derivatives of W divided by W (= minus those of w)
  d.d_rho = c4 * rg1 * fa;
  d.d_b = c2 * b * fK;
  // second derivatives divided by W
  d.d_rho_rho = c4 * ((p.gamma - 1.0) * rg2 * fa + (p.gamma / (2.0 - p.gamma)) * rg1 * fa2 * df.d_rho) +
                d.d_rho * d.d_rho;
  d.d_rho_b = c4 * (p.gamma / (2.0 - p.gamma)) * rg1 * fa2 * df.d_b + d.d_rho * d.d_b;
  d.d_b_b = c2 * (fK + (2.0 / (2.0 - p.gamma)) * b * fa * df.d_b) + d.d_b * d.d_b;
  return d;
}

ScaledDerivs scaled_derivs_Z(double rho, double b, const Params& p, const QuadOptions& q) {
  const ExtReal g = eval_g(rho, b, p);
  ScaledDerivs d;
  if (g.infinite) {
    d.infinite = true;
    return d;
  }
  const ExtReal z = eval_z(rho, b, p, q);
  d.w = z.value;
  const double K = w_exponent(p);
  const double a = w_tail_exponent(p);
  const double a2 = 2.0 * (p.gamma - 1.0) / (2.0 - p.gamma);
  const double c4 = 4.0 * p.gamma / (2.0 - p.gamma);
  const double c2 = 2.0 * p.gamma / (2.0 - p.gamma);
  const double gv = g.value;
  const double ga = std::pow(gv, a);
  const double gK = std::pow(gv, K);
  const double ga2 = std::pow(gv, a2);
  const double rg1 = pow_gamma(rho, p.gamma - 1.0);
  const double rg2 = pow_gamma(rho, p.gamma - 2.0);
  const Grad2 dg = grad_g(rho, b, p);
  d.d_rho = -c4 * rg1 * ga;
  d.d_b = c2 * b * gK;
  d.d_rho_rho = -c4 * ((p.gamma - 1.0) * ga * rg2 + (p.gamma / (2.0 - p.gamma)) * rg1 * ga2 * dg.d_rho) +
                d.d_rho * d.d_rho;
  d.d_rho_b = -c4 * (p.gamma / (2.0 - p.gamma)) * rg1 * ga2 * dg.d_b + d.d_rho * d.d_b;
  d.d_b_b = c2 * (gK + (2.0 / (2.0 - p.gamma)) * ga * b * dg.d_b) + d.d_b * d.d_b;
  return d;
}

namespace {

DerivBundle unscale(const ScaledDerivs& d) {
  DerivBundle out;
  if (d.infinite) return out;  // derivatives vanish on the infinite branch
  if (d.w > 745.0) return out;  // e^{-w} underflows to exactly 0, and so do the true entries
  const double W = std::exp(-d.w);
  out.d_rho = d.d_rho * W;
  out.d_b = d.d_b * W;
  out.d_rho_rho = d.d_rho_rho * W;
  out.d_rho_b = d.d_rho_b * W;
  out.d_b_b = d.d_b_b * W;
  return out;
}

}  // namespace

DerivBundle grad_hess_W(double rho, double b, const Params& p, const QuadOptions& q) {
  return unscale(scaled_derivs_W(rho, b, p, q));
}

DerivBundle grad_hess_Z(double rho, double b, const Params& p, const QuadOptions& q) {
  return unscale(scaled_derivs_Z(rho, b, p, q));
}

namespace {

// bisection for f(x) = target with f monotone on [lo, hi]
double bisect(const std::function<double(double)>& f, double lo, double hi, double target,
              bool increasing) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double v = f(mid);
    const bool go_right = increasing ? (v < target) : (v > target);
    if (go_right) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double rho_upper_from_w(double w0, const Params& p, const QuadOptions& q) {
  // w(., 0) decreases from +inf to -inf on (b0^(2/gamma), inf)
  const double rho_branch = std::pow(p.b0 * p.b0, 1.0 / p.gamma);
  auto wal = [&](double rho) { return eval_w(rho, 0.0, p, q).value; };
  double lo = rho_branch * (1.0 + 1e-12);
  double hi = rho_branch * 2.0;
  if (!(wal(lo) >= w0)) return rho_branch;  // envelope higher than the profile resolves
  while (wal(hi) > w0) {
    hi *= 2.0;
    if (hi > 1e12) return hi;  // w0 so small the bound is effectively absent
  }
  return bisect(wal, lo, hi, w0, /*increasing=*/false);
}

double rho_lower_from_z(double z0, const Params& p, const QuadOptions& q) {
  if (!(z0 > 0.0)) throw ConfigError("rho_lower_from_z: z0 must be positive");
  // z(., 0) increases from 0 to +inf on (0, b0^(2/gamma))
  const double rho_branch = std::pow(p.b0 * p.b0, 1.0 / p.gamma);
  auto zal = [&](double rho) { return eval_z(rho, 0.0, p, q).value; };
  double hi = rho_branch * (1.0 - 1e-12);
  double lo = rho_branch * 0.5;
  while (zal(lo) > z0) {
    lo *= 0.5;
    if (lo < 1e-300) return 0.0;
  }
  return bisect(zal, lo, hi, z0, /*increasing=*/true);
}

double b_bound_from_w(double w0, const Params& p, const QuadOptions& q) {
  // sup_rho w(rho, B) is the rho -> 0+ profile (w decreases in rho); it
  // decreases from +inf to -inf in |B|
  const double rho_eps = 1e-10;
  auto wal = [&](double b) { return eval_w(rho_eps, b, p, q).value; };
  double lo = 1e-8;
  double hi = 1.0;
  while (wal(hi) > w0) {
    hi *= 2.0;
    if (hi > 1e12) return hi;
  }
  while (wal(lo) < w0) {
    lo *= 0.5;
    if (lo < 1e-300) return 0.0;
  }
  return bisect(wal, lo, hi, w0, /*increasing=*/false);
}

ZetaPair zeta_roots(double rho_bar, double b_bar, const Params& p) {
  if (!(rho_bar > 0.0)) throw ConfigError("zeta_roots: rho_bar must be positive");
  if (b_bar == 0.0) throw ConfigError("zeta_roots: b_bar must be nonzero");
  const double rho_g = pow_gamma(rho_bar, p.gamma);
  const double D = b_bar * b_bar + p.b0 * p.b0 - rho_g;
  const double S = std::sqrt(D * D + 4.0 * b_bar * b_bar * rho_g);
  const double product = -pow_gamma(rho_bar, p.gamma - 2.0);
  ZetaPair zp{};
  if (D >= 0.0) {
    zp.zeta2 = -(D + S) / (2.0 * b_bar * rho_bar);  // larger magnitude first
    zp.zeta1 = product / zp.zeta2;
  } else {
    zp.zeta1 = (S - D) / (2.0 * b_bar * rho_bar);
    zp.zeta2 = product / zp.zeta1;
  }
  return zp;
}

std::vector<LevelPoint> level_grid(const Params& p, double rho_lo, double rho_hi, int n_rho,
                                   double b_lo, double b_hi, int n_b, LevelWhich which,
                                   const QuadOptions& q) {
  if (!(rho_lo > 0.0) || !(rho_hi >= rho_lo)) throw ConfigError("level_grid: bad rho range");
  if (n_rho < 1 || n_b < 1) throw ConfigError("level_grid: counts must be positive");
  const std::size_t total = static_cast<std::size_t>(n_rho) * static_cast<std::size_t>(n_b);
  std::vector<LevelPoint> table(total);
  const double drho = n_rho > 1 ? (rho_hi - rho_lo) / (n_rho - 1) : 0.0;
  const double db = n_b > 1 ? (b_hi - b_lo) / (n_b - 1) : 0.0;
  parallel_for_index(total, [&](std::size_t idx) {
    const int ir = static_cast<int>(idx) / n_b;
    const int ib = static_cast<int>(idx) % n_b;
    LevelPoint pt{rho_lo + ir * drho, b_lo + ib * db, 0.0, 0};
    try {
      const ExtReal v =
          which == LevelWhich::W ? eval_w(pt.rho, pt.b, p, q) : eval_z(pt.rho, pt.b, p, q);
      if (v.infinite) {
        pt.value = 0.0;
        pt.branch = 1;
      } else {
        pt.value = std::exp(-v.value);
        pt.branch = 0;
      }
    } catch (const QuadratureError&) {
      pt.value = std::numeric_limits<double>::quiet_NaN();
      pt.branch = 2;
    }
    table[idx] = pt;
  });
  return table;
}

}  // namespace relaxvars
}  // namespace mrelax
