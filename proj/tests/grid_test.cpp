#include <doctest.h>

#include <cmath>
#include <random>

#include "mrelax/grid.hpp"

using namespace mrelax;

namespace {

double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// band-limited random field with modes up to kmax
Field random_band_limited(const GridPtr& g, int kmax, unsigned seed, bool zero_mean = false) {
  std::mt19937_64 rng(seed);
  auto u = [&] { return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0; };
  Field f(g);
  const double c0 = zero_mean ? 0.0 : u();
  for (std::size_t i = 0; i < g->n; ++i) f[i] = c0;
  for (int k = 1; k <= kmax; ++k) {
    const double a = u(), b = u();
    for (std::size_t i = 0; i < g->n; ++i) {
      const double x = g->points[i];
      f[i] += a * std::cos(k * x) + b * std::sin(k * x);
    }
  }
  return f;
}

}  // namespace

TEST_CASE("make_grid basics") {
  auto g = make_grid(64);
  CHECK(g->dx == doctest::Approx(kTwoPi / 64).epsilon(1e-15));
  CHECK(g->n * g->dx == doctest::Approx(g->length).epsilon(1e-15));
  CHECK(g->wavenumbers.size() == 64);

  auto g2 = make_grid(16, 1.0);
  // wavenumbers are integer multiples of 2*pi/length
  for (std::size_t j = 0; j < g2->n; ++j) {
    const double ratio = g2->wavenumbers[j] / kTwoPi;
    CHECK(std::abs(ratio - std::round(ratio)) < 1e-12);
  }

  CHECK_THROWS_WITH_AS(make_grid(15), doctest::Contains("even"), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(8), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(64, -1.0), std::invalid_argument);
}

TEST_CASE("spectral derivative identities") {
  auto g = make_grid(64);
  const Field s = Field::sample(g, [](double x) { return std::sin(x); });
  const Field c = Field::sample(g, [](double x) { return std::cos(x); });
  CHECK(max_abs_diff(deriv(s, 1), c) < 1e-12);

  const Field k = Field::constant(g, 4.2);
  for (int order = 1; order <= 4; ++order) {
    const Field d = deriv(k, order);
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(std::abs(d[i]) < 1e-13);
  }

  const Field s3 = Field::sample(g, [](double x) { return std::sin(3 * x); });
  const Field want = Field::sample(g, [](double x) { return -9.0 * std::sin(3 * x); });
  CHECK(max_abs_diff(deriv(s3, 2), want) < 1e-11);

  CHECK_THROWS_AS(deriv(s, 5), std::invalid_argument);
  CHECK_THROWS_AS(deriv(s, 0), std::invalid_argument);
}

TEST_CASE("mean") {
  auto g = make_grid(64);
  CHECK(mean(Field::constant(g, 3.0)) == doctest::Approx(3.0).epsilon(1e-16));
  CHECK(std::abs(mean(Field::sample(g, [](double x) { return std::sin(x); }))) < 1e-15);
  const Field f = Field::sample(g, [](double x) { return 1.0 + 0.1 * std::cos(2 * x); });
  CHECK(std::abs(mean(f) - 1.0) < 1e-14);
}

TEST_CASE("sobolev seminorm") {
  auto g = make_grid(64);
  CHECK(sobolev_seminorm(Field::constant(g, 7.0), 1) == 0.0);
  const Field s = Field::sample(g, [](double x) { return std::sin(x); });
  CHECK(sobolev_seminorm(s, 0) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
  const Field s2 = Field::sample(g, [](double x) { return std::sin(2 * x); });
  const double ratio = sobolev_seminorm(s2, 1) / sobolev_seminorm(s2, 0);
  CHECK(ratio == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("parseval") {
  auto g = make_grid(128);
  const Field f = random_band_limited(g, 30, 7);
  double phys = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) phys += f[i] * f[i];
  phys *= g->dx;
  const double spec = sobolev_seminorm(f, 0);
  CHECK(std::abs(phys - spec * spec) / phys < 1e-12);
  CHECK(std::abs(l2_norm(f) - spec) / spec < 1e-12);
}

TEST_CASE("derivative composition and mean annihilation") {
  auto g = make_grid(128);
  const Field f = random_band_limited(g, 20, 11);
  const Field d2a = deriv(deriv(f, 1), 1);
  const Field d2b = deriv(f, 2);
  double scale = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) scale = std::max(scale, std::abs(d2b[i]));
  CHECK(max_abs_diff(d2a, d2b) / scale < 1e-10);

  // absolute for O(1) derivatives, scaled by the derivative's magnitude above that
  for (int k = 1; k <= 4; ++k) {
    const Field d = deriv(f, k);
    double linf = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) linf = std::max(linf, std::abs(d[i]));
    CHECK(std::abs(mean(d)) < 1e-13 * std::max(1.0, linf));
  }
}

TEST_CASE("discrete poincare on mean-zero fields") {
  auto g = make_grid(64);
  for (unsigned seed = 1; seed <= 5; ++seed) {
    const Field f = random_band_limited(g, 25, seed, true);
    CHECK(sobolev_seminorm(f, 1) >= sobolev_seminorm(f, 0));
  }
}
