#include "mrelax/audit.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

#include "mrelax/relaxvars.hpp"
#include "mrelax/runner.hpp"

namespace mrelax {
namespace {

using namespace relaxvars;

// Uniform double in [lo, hi) built from raw engine output, so the stream is
// identical across standard libraries.
double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

struct Accumulator {
  AuditCheck check;
  explicit Accumulator(std::string name, double tol) {
    check.name = std::move(name);
    check.tol = tol;
  }
  void add(double err) {
    check.max_err = std::max(check.max_err, err);
    ++check.n_points;
  }
  void skip() { ++check.n_skipped; }
  AuditCheck finish() {
    check.pass = check.max_err <= check.tol;
    return check;
  }
};

double rel_err(double got, double want, double scale_floor = 0.0) {
  const double scale = std::max({std::abs(want), scale_floor,
                                 std::numeric_limits<double>::min()});
  return std::abs(got - want) / scale;
}

// ---- finite-difference stencils (4th order) --------------------------------

template <typename F>
double fd_first(F&& f, double h) {
  return (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h);
}

template <typename F>
double fd_second(F&& f, double h) {
  return (-f(-2.0 * h) + 16.0 * f(-h) - 30.0 * f(0.0) + 16.0 * f(h) - f(2.0 * h)) /
         (12.0 * h * h);
}

template <typename F>
double fd_mixed(F&& f, double hx, double hy) {
  // first-derivative stencil applied in both directions: O(h^4)
  const double c[4] = {1.0, -8.0, 8.0, -1.0};
  const double o[4] = {-2.0, -1.0, 1.0, 2.0};
  double acc = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) acc += c[i] * c[j] * f(o[i] * hx, o[j] * hy);
  return acc / (144.0 * hx * hy);
}

// ---- differences of w and z with correlated quadrature error ---------------
//
// w(p2) - w(p1) = (B2^2 f2^K - B1^2 f1^K) + c * int_{f1}^{f2} s^a/(1-s/2)^2 ds
// (the constant 4^K B0^2 cancels); likewise for z with (1+s/2)^2. Evaluating
// the short integral directly keeps the absolute error of the difference at
// the eps*|w| floor instead of tol*|w| from two independent evaluations.
struct PotentialDiff {
  const Params& p;
  bool use_w;  // true: w with f, false: z with g
  QuadOptions quad{1e-13, 0.0, 40000, 64};

  double operator()(double rho1, double b1, double rho2, double b2) const {
    const ExtReal r1 = use_w ? eval_f(rho1, b1, p) : eval_g(rho1, b1, p);
    const ExtReal r2 = use_w ? eval_f(rho2, b2, p) : eval_g(rho2, b2, p);
    const double K = 2.0 / (2.0 - p.gamma);
    const double a = p.gamma / (2.0 - p.gamma);
    const double c = 2.0 * p.b0 * p.b0 / (2.0 - p.gamma);
    const double closed =
        b2 * b2 * std::pow(r2.value, K) - b1 * b1 * std::pow(r1.value, K);
    const double sgn = use_w ? -0.5 : 0.5;
    auto integrand = [a, sgn](double s) {
      const double d = 1.0 + sgn * s;
      return std::pow(s, a) / (d * d);
    };
    double lo = r1.value, hi = r2.value, flip = 1.0;
    if (lo > hi) {
      std::swap(lo, hi);
      flip = -1.0;
    }
    return closed + flip * c * integrate(integrand, lo, hi, quad);
  }
};

// Composite Simpson with Kahan summation, for the quadrature oracle.
template <typename F>
double simpson(F&& f, double a, double b, int panels) {
  const double h = (b - a) / (2.0 * panels);
  double sum = f(a) + f(b);
  double comp = 0.0;
  auto add = [&](double v) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  };
  for (int i = 1; i < 2 * panels; ++i) add((i % 2 ? 4.0 : 2.0) * f(a + i * h));
  return sum * h / 3.0;
}

}  // namespace

AuditReport run_audit(const Params& p, const AuditOptions& opt) {
  validate_params(p);
  AuditReport report;
  report.params = p;
  report.options = opt;

  auto tol = [&](double def) {
    return std::isnan(opt.tol_override) ? def : opt.tol_override;
  };

  // sample the box minus the exclusion tube
  std::mt19937_64 rng(opt.seed);
  std::vector<std::pair<double, double>> pts;
  const double b0sq = p.b0 * p.b0;
  int guard = 0;
  while (static_cast<int>(pts.size()) < opt.n_points && ++guard < 100 * opt.n_points + 1000) {
    const double rho = uniform(rng, opt.rho_lo, opt.rho_hi);
    const double b = uniform(rng, opt.b_lo, opt.b_hi);
    if (std::abs(b) <= opt.exclusion) continue;
    if (std::abs(pow_gamma(rho, p.gamma) - b0sq) <= opt.exclusion) continue;
    pts.emplace_back(rho, b);
  }

  const QuadOptions tight{1e-13, 0.0, 40000, 64};
  const double h0 = opt.fd_step;

  Accumulator fd_f("fd_grad_f", tol(1e-6)), fd_g("fd_grad_g", tol(1e-6));
  Accumulator fd_w("fd_grad_w", tol(1e-6)), fd_z("fd_grad_z", tol(1e-6));
  Accumulator fd_Wg("fd_W_grad", tol(1e-6)), fd_Wh("fd_W_hess", tol(1e-6));
  Accumulator fd_Zg("fd_Z_grad", tol(1e-6)), fd_Zh("fd_Z_hess", tol(1e-6));
  Accumulator id_fg("identity_fg_product", tol(1e-10));
  Accumulator id_fmg("identity_f_minus_g", tol(1e-10));
  Accumulator id_af("identity_alpha_forms", tol(1e-10));
  Accumulator id_bf("identity_beta_forms", tol(1e-10));
  Accumulator id_tr("identity_trace", tol(1e-10));
  Accumulator id_det("identity_det", tol(1e-10));
  Accumulator id_dw("identity_diagonalization_W", tol(1e-10));
  Accumulator id_dz("identity_diagonalization_Z", tol(1e-10));
  Accumulator id_rw("identity_char_ratio_w", tol(1e-10));
  Accumulator id_rz("identity_char_ratio_z", tol(1e-10));
  Accumulator ev_w("eigvec_residual_W", tol(1e-9));
  Accumulator ev_z("eigvec_residual_Z", tol(1e-9));
  Accumulator sq_w("quadrature_simpson_w", tol(1e-9));
  Accumulator sq_z("quadrature_simpson_z", tol(1e-9));
  Accumulator signs("sign_violations", std::isnan(opt.tol_override) ? 0.5 : opt.tol_override);

  const PotentialDiff wdiff{p, true};
  const PotentialDiff zdiff{p, false};

  const double K = 2.0 / (2.0 - p.gamma);
  const double cint = 2.0 * b0sq / (2.0 - p.gamma);

  auto simpson_points = [&](double rho, double b, bool force) {
    // Oracle for the adaptive quadrature: the original closed forms assembled
    // with a brute-force composite-Simpson integral.
    const ExtReal f = eval_f(rho, b, p);
    const ExtReal g = eval_g(rho, b, p);
    if (force || (f.value >= 2.05 && f.value <= 100.0)) {
      const double oracle =
          (b * b + b0sq) * std::pow(f.value, K) -
          cint * (f.value <= 4.0 ? 1.0 : -1.0) *
              simpson(
                  [K](double s) {
                    const double d = 1.0 - 0.5 * s;
                    return (1.0 - 0.25 * s) / (d * d) * std::pow(s, K);
                  },
                  std::min(f.value, 4.0), std::max(f.value, 4.0), opt.simpson_panels);
      sq_w.add(rel_err(eval_w(rho, b, p, tight).value, oracle));
    } else {
      sq_w.skip();
    }
    if (force || (g.value >= 1e-3 && g.value <= 100.0)) {
      const double oracle = (b * b + b0sq) * std::pow(g.value, K) -
                            cint * simpson(
                                       [K](double s) {
                                         const double d = 1.0 + 0.5 * s;
                                         return (1.0 + 0.25 * s) / (d * d) * std::pow(s, K);
                                       },
                                       0.0, g.value, opt.simpson_panels);
      sq_z.add(rel_err(eval_z(rho, b, p, tight).value, oracle));
    } else {
      sq_z.skip();
    }
  };

  // canonical quadrature cross-check point plus a few sampled ones
  simpson_points(1.2, 0.4, true);
  for (std::size_t i = 0; i < pts.size(); i += std::max<std::size_t>(1, pts.size() / 4)) {
    simpson_points(pts[i].first, pts[i].second, false);
  }

  for (const auto& [rho, b] : pts) {
    const ExtReal f = eval_f(rho, b, p);
    const ExtReal g = eval_g(rho, b, p);
    const double rho_g = pow_gamma(rho, p.gamma);
    const double D = b * b + b0sq - rho_g;
    const double S = std::sqrt(D * D + 4.0 * b * b * rho_g);

    // --- closed-form identities -------------------------------------------
    id_fg.add(rel_err(f.value * g.value, 4.0 * rho_g / (b * b)));
    id_fmg.add(rel_err(f.value - g.value, 2.0 * D / (b * b),
                       std::abs(f.value) + std::abs(g.value)));

    const double alpha = eval_alpha(rho, b, p);
    const double beta = eval_beta(rho, b, p);
    const double a_form1 = b0sq / rho * f.value / (f.value - 2.0);
    const double a_form3 = pow_gamma(rho, p.gamma - 1.0) + b * b * f.value / (2.0 * rho);
    id_af.add(std::max(rel_err(a_form1, alpha), rel_err(a_form3, alpha)));
    const double b_form2 = (b * b + b0sq) / rho - 2.0 * pow_gamma(rho, p.gamma - 1.0) / g.value;
    const double b_form3 = pow_gamma(rho, p.gamma - 1.0) - b * b * g.value / (2.0 * rho);
    id_bf.add(std::max(rel_err(b_form2, beta), rel_err(b_form3, beta)));

    const Mat2 M = diffusion_matrix(rho, b, p);
    id_tr.add(rel_err(alpha + beta, M.trace()));
    id_det.add(rel_err(alpha * beta, pow_gamma(rho, p.gamma - 2.0) * b0sq));

    // --- characteristic-ratio identity --------------------------------------
    const Grad2 gw = grad_w(rho, b, p);
    const Grad2 gz = grad_z(rho, b, p);
    const double target_w =
        D >= 0.0 ? 2.0 * b * pow_gamma(rho, p.gamma - 1.0) / (D + S) : (S - D) / (2.0 * b * rho);
    const double target_z =
        D >= 0.0 ? -(D + S) / (2.0 * b * rho) : -2.0 * b * pow_gamma(rho, p.gamma - 1.0) / (S - D);
    id_rw.add(rel_err(gw.d_rho / gw.d_b, target_w));
    id_rz.add(rel_err(gz.d_rho / gz.d_b, target_z));

    // --- diagonalization rows and eigenvector residuals (W-scaled) ----------
    const ScaledDerivs dW = scaled_derivs_W(rho, b, p, tight);
    const ScaledDerivs dZ = scaled_derivs_Z(rho, b, p, tight);
    {
      const double t1 = pow_gamma(rho, p.gamma - 1.0) * dW.d_rho;
      const double t2 = pow_gamma(rho, p.gamma - 2.0) * b * dW.d_b;
      const double t3 = -alpha * dW.d_rho;
      const double row1 = t1 + t2 + t3;
      const double s1 = std::max({std::abs(t1), std::abs(t2), std::abs(t3)});
      const double u1 = b * dW.d_rho;
      const double u2 = (b * b + b0sq) / rho * dW.d_b;
      const double u3 = -alpha * dW.d_b;
      const double row2 = u1 + u2 + u3;
      const double s2 = std::max({std::abs(u1), std::abs(u2), std::abs(u3)});
      id_dw.add(std::max(std::abs(row1) / s1, std::abs(row2) / s2));
      const double r1 = dW.d_rho * M.a11 + dW.d_b * M.a21 - alpha * dW.d_rho;
      const double r2 = dW.d_rho * M.a12 + dW.d_b * M.a22 - alpha * dW.d_b;
      const double scale = alpha * std::hypot(dW.d_rho, dW.d_b);
      ev_w.add(std::hypot(r1, r2) / scale);
    }
    {
      const double t1 = pow_gamma(rho, p.gamma - 1.0) * dZ.d_rho;
      const double t2 = pow_gamma(rho, p.gamma - 2.0) * b * dZ.d_b;
      const double t3 = -beta * dZ.d_rho;
      const double row1 = t1 + t2 + t3;
      const double s1 = std::max({std::abs(t1), std::abs(t2), std::abs(t3)});
      const double u1 = b * dZ.d_rho;
      const double u2 = (b * b + b0sq) / rho * dZ.d_b;
      const double u3 = -beta * dZ.d_b;
      const double row2 = u1 + u2 + u3;
      const double s2 = std::max({std::abs(u1), std::abs(u2), std::abs(u3)});
      id_dz.add(std::max(std::abs(row1) / s1, std::abs(row2) / s2));
      const double r1 = dZ.d_rho * M.a11 + dZ.d_b * M.a21 - beta * dZ.d_rho;
      const double r2 = dZ.d_rho * M.a12 + dZ.d_b * M.a22 - beta * dZ.d_b;
      const double scale = beta * std::hypot(dZ.d_rho, dZ.d_b);
      ev_z.add(std::hypot(r1, r2) / scale);
    }

    // --- sign audit ----------------------------------------------------------
    {
      int bad = 0;
      if (!(f.value > 2.0)) ++bad;
      if (!(g.value > 0.0)) ++bad;
      if (!(alpha > 0.0) || !(beta > 0.0)) ++bad;
      const ExtReal zv = eval_z(rho, b, p, tight);
      if (!(zv.value > 0.0)) ++bad;
      if (!(dW.d_rho >= 0.0)) ++bad;                    // dW/drho >= 0
      if (!(dW.d_b * (b >= 0.0 ? 1.0 : -1.0) >= 0.0)) ++bad;  // W increases in |B|
      if (!(dZ.d_b * (b >= 0.0 ? 1.0 : -1.0) >= 0.0)) ++bad;  // eq. (dZ/dB) sgn(B) >= 0
      if (bad) signs.add(static_cast<double>(bad));
      else signs.add(0.0);
    }

    // --- FD checks of f and g gradients -------------------------------------
    {
      const Grad2 gf = grad_f(rho, b, p);
      const double fdr = fd_first([&](double d) { return eval_f(rho + d, b, p).value; }, h0);
      const double fdb = fd_first([&](double d) { return eval_f(rho, b + d, p).value; }, h0);
      fd_f.add(std::max(rel_err(gf.d_rho, fdr), rel_err(gf.d_b, fdb, std::abs(gf.d_rho))));
      const Grad2 gg = grad_g(rho, b, p);
      const double gdr = fd_first([&](double d) { return eval_g(rho + d, b, p).value; }, h0);
      const double gdb = fd_first([&](double d) { return eval_g(rho, b + d, p).value; }, h0);
      fd_g.add(std::max(rel_err(gg.d_rho, gdr), rel_err(gg.d_b, gdb, std::abs(gg.d_rho))));
    }

    // --- FD checks of w and z gradients (independent evaluations) -----------
    {
      const double fdr = fd_first([&](double d) { return eval_w(rho + d, b, p, tight).value; }, h0);
      const double fdb = fd_first([&](double d) { return eval_w(rho, b + d, p, tight).value; }, h0);
      fd_w.add(std::max(rel_err(gw.d_rho, fdr), rel_err(gw.d_b, fdb, std::abs(gw.d_rho))));
      const double zdr = fd_first([&](double d) { return eval_z(rho + d, b, p, tight).value; }, h0);
      const double zdb = fd_first([&](double d) { return eval_z(rho, b + d, p, tight).value; }, h0);
      fd_z.add(std::max(rel_err(gz.d_rho, zdr), rel_err(gz.d_b, zdb, std::abs(gz.d_rho))));
    }

    // --- FD checks of W and Z derivatives in the W-scaled frame -------------
    // V(dr, db) = W(p + d)/W(p) = exp(-(w(p+d) - w(p))); its derivatives at 0
    // are the W-derivatives divided by W(p), matching ScaledDerivs exactly.
    // Conditioning gate: e^{-w} only carries |w|*eps relative accuracy, so
    // points with |w| > 1e4 cannot support a 1e-6 comparison in doubles.
    auto scaled_fd = [&](const ScaledDerivs& dd, const PotentialDiff& diff, Accumulator& grad_acc,
                         Accumulator& hess_acc, double rho0, double b0v) {
      if (std::abs(dd.w) > 1e4) {
        grad_acc.skip();
        hess_acc.skip();
        return;
      }
      const double gr = std::max(std::abs(dd.d_rho), 1.0);
      const double gb = std::max(std::abs(dd.d_b), 1.0);
      const double hr = std::min(h0, 0.03 / gr);
      const double hb = std::min(h0, 0.03 / gb);
      // expm1 rather than exp: the FD stencils annihilate the constant shift,
      // and for tiny exponent excursions exp() would quantize at eps-of-one.
      auto V = [&](double dr, double db) {
        return std::expm1(-diff(rho0, b0v, rho0 + dr, b0v + db));
      };
      const double v_r = fd_first([&](double d) { return V(d, 0.0); }, hr);
      const double v_b = fd_first([&](double d) { return V(0.0, d); }, hb);
      grad_acc.add(std::max(rel_err(v_r, dd.d_rho, gb), rel_err(v_b, dd.d_b, gr)));
      // second differences divide the eps*|w| value noise by h^2, so they run
      // on a 10x wider stencil; the O(h^4) truncation stays far below 1e-6
      const double hr2 = std::min(10.0 * h0, 0.03 / gr);
      const double hb2 = std::min(10.0 * h0, 0.03 / gb);
      const double v_rr = fd_second([&](double d) { return V(d, 0.0); }, hr2);
      const double v_bb = fd_second([&](double d) { return V(0.0, d); }, hb2);
      const double v_rb = fd_mixed(V, hr2, hb2);
      const double scale2 = std::max({std::abs(dd.d_rho_rho), std::abs(dd.d_rho_b),
                                      std::abs(dd.d_b_b), dd.d_rho * dd.d_rho,
                                      dd.d_b * dd.d_b, std::abs(dd.d_rho * dd.d_b)});
      hess_acc.add(std::max({std::abs(v_rr - dd.d_rho_rho), std::abs(v_rb - dd.d_rho_b),
                             std::abs(v_bb - dd.d_b_b)}) /
                   scale2);
    };
    scaled_fd(dW, wdiff, fd_Wg, fd_Wh, rho, b);
    scaled_fd(dZ, zdiff, fd_Zg, fd_Zh, rho, b);
  }

  for (Accumulator* acc :
       {&fd_f, &fd_g, &fd_w, &fd_z, &fd_Wg, &fd_Wh, &fd_Zg, &fd_Zh, &id_fg, &id_fmg, &id_af,
        &id_bf, &id_tr, &id_det, &id_dw, &id_dz, &id_rw, &id_rz, &ev_w, &ev_z, &sq_w, &sq_z,
        &signs}) {
    report.checks.push_back(acc->finish());
  }
  report.pass = std::all_of(report.checks.begin(), report.checks.end(),
                            [](const AuditCheck& c) { return c.pass; });
  return report;
}

std::string audit_report_json(const AuditReport& r) {
  nlohmann::ordered_json j;
  j["gamma"] = r.params.gamma;
  j["b0"] = r.params.b0;
  j["seed"] = r.options.seed;
  j["n_points"] = r.options.n_points;
  j["box"] = {{"rho_lo", r.options.rho_lo},
              {"rho_hi", r.options.rho_hi},
              {"b_lo", r.options.b_lo},
              {"b_hi", r.options.b_hi},
              {"exclusion", r.options.exclusion}};
  if (!std::isnan(r.options.tol_override)) j["tol_override"] = r.options.tol_override;
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name},
                      {"max_err", c.max_err},
                      {"tol", c.tol},
                      {"n_points", c.n_points},
                      {"n_skipped", c.n_skipped},
                      {"pass", c.pass}});
  }
  j["checks"] = checks;
  j["pass"] = r.pass;
  return j.dump(2) + "\n";
}

}  // namespace mrelax
