#include <doctest.h>

#include <cmath>
#include <random>

#include "mrelax/errors.hpp"
#include "mrelax/model.hpp"
#include "mrelax/relaxvars.hpp"

using namespace mrelax;

namespace {

// Independent oracle: 4th-order central differences on a periodic fine grid,
// composed exactly like the flux form of the equations.
Field fd1(const Field& f) {
  const std::size_t n = f.size();
  const double h = f.grid().dx;
  Field out(f.grid_ptr());
  for (std::size_t i = 0; i < n; ++i) {
    const double m2 = f[(i + n - 2) % n], m1 = f[(i + n - 1) % n];
    const double p1 = f[(i + 1) % n], p2 = f[(i + 2) % n];
    out[i] = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
  }
  return out;
}

Field fd2(const Field& f) {
  const std::size_t n = f.size();
  const double h = f.grid().dx;
  Field out(f.grid_ptr());
  for (std::size_t i = 0; i < n; ++i) {
    const double m2 = f[(i + n - 2) % n], m1 = f[(i + n - 1) % n];
    const double p1 = f[(i + 1) % n], p2 = f[(i + 2) % n];
    out[i] = (-m2 + 16.0 * m1 - 30.0 * f[i] + 16.0 * p1 - p2) / (12.0 * h * h);
  }
  return out;
}

struct RhsOracle {
  Field drho, db;
};

RhsOracle fd_rhs_oracle(const State& s, const Params& p) {
  const GridPtr& g = s.rho.grid_ptr();
  Field pressure(g);
  for (std::size_t i = 0; i < g->n; ++i) {
    pressure[i] = pow_gamma(s.rho[i], p.gamma) / p.gamma + 0.5 * s.b[i] * s.b[i];
  }
  const Field dp = fd1(pressure);
  const Field dbx = fd1(s.b);
  Field flux(g);
  for (std::size_t i = 0; i < g->n; ++i) {
    flux[i] = s.b[i] / s.rho[i] * dp[i] + p.b0 * p.b0 / s.rho[i] * dbx[i];
  }
  return {fd2(pressure), fd1(flux)};
}

State sampled_state(const GridPtr& g, double rho_amp, double b_amp) {
  State s;
  s.rho = Field::sample(g, [&](double x) { return 1.0 + rho_amp * std::cos(x); });
  s.b = Field::sample(g, [&](double x) { return b_amp * std::sin(x); });
  s.time = 0.0;
  return s;
}

// relative L2 error of the spectral rhs at resolution n against the fine-grid
// finite-difference oracle, sampled at common points
double rhs_vs_oracle_error(std::size_t n, std::size_t n_fine, double rho_amp, double b_amp,
                           const Params& p) {
  const GridPtr gf = make_grid(n_fine);
  const State sf = sampled_state(gf, rho_amp, b_amp);
  const RhsOracle oracle = fd_rhs_oracle(sf, p);

  const GridPtr gc = make_grid(n);
  const State sc = sampled_state(gc, rho_amp, b_amp);
  const auto [drho, db] = rhs(sc, p);

  const std::size_t stride = n_fine / n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double er = drho[i] - oracle.drho[i * stride];
    const double eb = db[i] - oracle.db[i * stride];
    num += er * er + eb * eb;
    const double orr = oracle.drho[i * stride], orb = oracle.db[i * stride];
    den += orr * orr + orb * orb;
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("params validation") {
  CHECK_THROWS_WITH_AS(validate_params(Params{2.3, 1.0, 0.0}), doctest::Contains("(1, 2)"),
                       ConfigError);
  CHECK_THROWS_AS(validate_params(Params{1.0, 1.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(validate_params(Params{1.5, 0.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(validate_params(Params{1.5, 1.0, -1e-3}), ConfigError);
  CHECK_THROWS_AS(validate_params(Params{1.99, 1.0, 0.0}), ConfigError);
  CHECK_NOTHROW(validate_params(Params{1.5, 1.0, 0.0}));
}

TEST_CASE("rhs vanishes on constant states for any epsilon") {
  const GridPtr g = make_grid(64);
  for (double eps : {0.0, 1e-3}) {
    const Params p{1.5, 1.0, eps};
    State s{Field::constant(g, 1.3), Field::constant(g, 0.4), 0.0};
    const auto [drho, db] = rhs(s, p);
    for (std::size_t i = 0; i < g->n; ++i) {
      CHECK(std::abs(drho[i]) < 1e-13);
      CHECK(std::abs(db[i]) < 1e-13);
    }
  }
}

TEST_CASE("B = 0 is an invariant subspace") {
  const GridPtr g = make_grid(64);
  const Params p{1.7, 1.0, 0.0};
  State s;
  s.rho = Field::sample(g, [](double x) { return 1.0 + 0.01 * std::cos(x); });
  s.b = Field::constant(g, 0.0);
  const auto [drho, db] = rhs(s, p);
  (void)drho;
  for (std::size_t i = 0; i < g->n; ++i) CHECK(std::abs(db[i]) < 1e-13);
}

TEST_CASE("rhs matches the fine-grid finite-difference oracle") {
  const Params p{1.5, 1.0, 0.0};
  CHECK(rhs_vs_oracle_error(128, 2048, 0.1, 0.1, p) < 1e-6);
}

TEST_CASE("rhs error against the oracle decays faster than n^-4") {
  // large amplitudes keep the coarse-grid spectral truncation far above the
  // oracle's own O(h^4) floor
  const Params p{1.5, 1.0, 0.0};
  const double e32 = rhs_vs_oracle_error(32, 2048, 0.9, 0.7, p);
  const double e64 = rhs_vs_oracle_error(64, 2048, 0.9, 0.7, p);
  const double e128 = rhs_vs_oracle_error(128, 2048, 0.9, 0.7, p);
  CHECK(e64 < e32 / 16.0);
  CHECK(e128 < e64 / 16.0);
}

TEST_CASE("rhs conserves the discrete means") {
  const GridPtr g = make_grid(128);
  std::mt19937_64 rng(3);
  auto u = [&] { return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0; };
  for (int trial = 0; trial < 5; ++trial) {
    const Params p{1.2 + 0.6 * (trial / 4.0), 0.5 + trial * 0.3, trial % 2 ? 1e-4 : 0.0};
    const double a1 = 0.3 * u(), a2 = 0.3 * u(), b1 = 0.4 * u(), b2 = 0.4 * u();
    State s;
    s.rho = Field::sample(g, [&](double x) { return 1.0 + a1 * std::cos(x) + a2 * std::sin(3 * x); });
    s.b = Field::sample(g, [&](double x) { return 0.2 + b1 * std::sin(x) + b2 * std::cos(2 * x); });
    const auto [drho, db] = rhs(s, p);
    double linf = 1.0;
    for (std::size_t i = 0; i < g->n; ++i)
      linf = std::max({linf, std::abs(drho[i]), std::abs(db[i])});
    CHECK(std::abs(mean(drho)) < 1e-13 * linf);
    CHECK(std::abs(mean(db)) < 1e-13 * linf);
  }
}

TEST_CASE("rhs rejects vacuum states") {
  const GridPtr g = make_grid(64);
  const Params p{1.5, 1.0, 0.0};
  State s{Field::constant(g, 1.0), Field::constant(g, 0.0), 2.5};
  s.rho[7] = -0.1;
  CHECK_THROWS_AS(rhs(s, p), VacuumError);
  try {
    rhs(s, p);
  } catch (const VacuumError& e) {
    CHECK(e.index == 7);
    CHECK(e.time == 2.5);
  }
}

TEST_CASE("hyperviscous term matches the analytic fourth derivative") {
  const GridPtr g = make_grid(64);
  const double eps = 1e-2;
  const Params p0{1.5, 1.0, 0.0};
  const Params pe{1.5, 1.0, eps};
  State s;
  s.rho = Field::sample(g, [](double x) { return 1.0 + 0.1 * std::sin(3 * x); });
  s.b = Field::sample(g, [](double x) { return 0.2 * std::cos(2 * x); });
  const auto [d0r, d0b] = rhs(s, p0);
  const auto [der, deb] = rhs(s, pe);
  for (std::size_t i = 0; i < g->n; ++i) {
    const double x = g->points[i];
    const double want_r = -eps * 81.0 * 0.1 * std::sin(3 * x);
    const double want_b = -eps * 16.0 * 0.2 * std::cos(2 * x);
    CHECK(std::abs((der[i] - d0r[i]) - want_r) < 1e-11);
    CHECK(std::abs((deb[i] - d0b[i]) - want_b) < 1e-11);
  }
}

TEST_CASE("dealiased rhs conserves means and stays close to the plain product rule") {
  const GridPtr g = make_grid(128);
  const Params p{1.5, 1.0, 0.0};
  State s;
  s.rho = Field::sample(g, [](double x) { return 1.0 + 0.3 * std::cos(x); });
  s.b = Field::sample(g, [](double x) { return 0.2 * std::sin(x) + 0.1 * std::cos(2 * x); });
  const auto [dr0, db0] = rhs(s, p, /*dealias=*/false);
  const auto [dr1, db1] = rhs(s, p, /*dealias=*/true);
  CHECK(std::abs(mean(dr1)) < 1e-12);
  CHECK(std::abs(mean(db1)) < 1e-12);
  // on resolved fields the truncation only touches spectrally tiny modes
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < g->n; ++i) {
    diff = std::max({diff, std::abs(dr1[i] - dr0[i]), std::abs(db1[i] - db0[i])});
    scale = std::max({scale, std::abs(dr0[i]), std::abs(db0[i])});
  }
  CHECK(diff / scale < 1e-9);
  CHECK(diff > 0.0);  // the switch does something
}

TEST_CASE("velocity recovery") {
  const GridPtr g = make_grid(64);

  {
    const Params p{1.5, 1.0, 0.0};
    State s{Field::constant(g, 2.0), Field::constant(g, 0.7), 0.0};
    const Velocity v = velocity(s, p);
    for (std::size_t i = 0; i < g->n; ++i) {
      CHECK(std::abs(v.ux[i]) < 1e-13);
      CHECK(std::abs(v.uz[i]) < 1e-13);
    }
  }

  // rho = 1, B = sin x, b0 = 2: uz = 2 cos x
  {
    const Params p{1.3, 2.0, 0.0};
    State s{Field::constant(g, 1.0), Field::sample(g, [](double x) { return std::sin(x); }), 0.0};
    const Velocity v = velocity(s, p);
    for (std::size_t i = 0; i < g->n; ++i) {
      CHECK(std::abs(v.uz[i] - 2.0 * std::cos(g->points[i])) < 1e-12);
    }
  }

  // B = 0: ux = -(rho^(gamma-1) rho_x)/rho
  {
    const Params p{1.5, 1.0, 0.0};
    State s{Field::sample(g, [](double x) { return 1.0 + 0.1 * std::cos(x); }),
            Field::constant(g, 0.0), 0.0};
    const Velocity v = velocity(s, p);
    for (std::size_t i = 0; i < g->n; ++i) {
      const double x = g->points[i];
      const double r = 1.0 + 0.1 * std::cos(x);
      const double want = -std::pow(r, p.gamma - 1.0) * (-0.1 * std::sin(x)) / r;
      CHECK(std::abs(v.ux[i] - want) < 1e-10);
    }
  }
}

TEST_CASE("diffusion matrix") {
  const Params p{1.5, 1.0, 0.0};
  const Mat2 id = diffusion_matrix(1.0, 0.0, p);
  CHECK(id.a11 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(id.a12 == 0.0);
  CHECK(id.a21 == 0.0);
  CHECK(id.a22 == doctest::Approx(1.0).epsilon(1e-15));

  const Mat2 m = diffusion_matrix(2.0, 0.5, p);
  CHECK(m.trace() == doctest::Approx(std::sqrt(2.0) + (0.25 + 1.0) / 2.0).epsilon(1e-14));

  std::mt19937_64 rng(17);
  auto u = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };
  for (int i = 0; i < 100; ++i) {
    const double rho = u(0.2, 3.0), b = u(-2.0, 2.0);
    const Mat2 mm = diffusion_matrix(rho, b, p);
    const double want = pow_gamma(rho, p.gamma - 2.0) * p.b0 * p.b0;
    CHECK(std::abs(mm.det() - want) / want < 1e-12);
  }

  CHECK_THROWS_AS(diffusion_matrix(-1.0, 0.0, p), ConfigError);
}

TEST_CASE("diffusion matrix eigenvalues are alpha and beta") {
  std::mt19937_64 rng(23);
  auto u = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };
  const Params p{1.6, 0.8, 0.0};
  for (int i = 0; i < 50; ++i) {
    const double rho = u(0.3, 2.5);
    double b = u(-1.5, 1.5);
    if (std::abs(b) < 1e-3) b = 0.5;
    const Mat2 m = diffusion_matrix(rho, b, p);
    const double tr = m.trace(), det = m.det();
    const double disc = std::sqrt(tr * tr - 4.0 * det);
    const double lam1 = 0.5 * (tr + disc), lam2 = 0.5 * (tr - disc);
    const double alpha = relaxvars::eval_alpha(rho, b, p);
    const double beta = relaxvars::eval_beta(rho, b, p);
    CHECK(std::abs(alpha - lam1) / lam1 < 1e-10);
    CHECK(std::abs(beta - lam2) / lam2 < 1e-10);
  }
}
