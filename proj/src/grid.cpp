#include "mrelax/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "mrelax/fft.hpp"

namespace mrelax {

GridPtr make_grid(std::size_t n, double length) {
  if (n % 2 != 0) throw std::invalid_argument("make_grid: n must be even");
  if (n < 16) throw std::invalid_argument("make_grid: n must be at least 16");
  if (!(length > 0.0)) throw std::invalid_argument("make_grid: length must be positive");
  auto g = std::make_shared<Grid>();
  g->n = n;
  g->length = length;
  g->dx = length / static_cast<double>(n);
  g->points.resize(n);
  g->wavenumbers.resize(n);
  const double scale = kTwoPi / length;
  for (std::size_t j = 0; j < n; ++j) {
    g->points[j] = g->dx * static_cast<double>(j);
    const auto sj = static_cast<std::ptrdiff_t>(j);
    const auto half = static_cast<std::ptrdiff_t>(n / 2);
    g->wavenumbers[j] = scale * static_cast<double>(sj < half ? sj : sj - static_cast<std::ptrdiff_t>(n));
  }
  return g;
}

Field::Field(GridPtr grid) : grid_(std::move(grid)), values_(grid_->n, 0.0) {}

Field::Field(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->n) throw std::invalid_argument("Field: values/grid size mismatch");
}

Field Field::sample(const GridPtr& grid, const std::function<double(double)>& f) {
  Field out(grid);
  for (std::size_t j = 0; j < grid->n; ++j) out[j] = f(grid->points[j]);
  return out;
}

Field Field::constant(const GridPtr& grid, double c) {
  Field out(grid);
  for (auto& v : out.values()) v = c;
  return out;
}

bool Field::all_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

namespace {

// (ik)^order applied to the half-complex spectrum bin with wavenumber k.
inline std::complex<double> ik_power(double k, int order) {
  switch (order) {
    case 1: return {0.0, k};
    case 2: return {-k * k, 0.0};
    case 3: return {0.0, -k * k * k};
    case 4: return {k * k * k * k, 0.0};
    default: throw std::invalid_argument("deriv: order must be in 1..4");
  }
}

}  // namespace

void field_spectrum(const Field& f, std::vector<std::complex<double>>& out) {
  out.resize(spectrum_size(f.size()));
  rfft(f.values(), out);
}

void spectrum_deriv_into(const Grid& g, std::span<const std::complex<double>> spec, int order,
                         Field& out) {
  const std::size_t half = g.n / 2;
  std::vector<std::complex<double>> tmp(spec.begin(), spec.end());
  for (std::size_t k = 0; k + 1 < tmp.size(); ++k) tmp[k] *= ik_power(static_cast<double>(k) * kTwoPi / g.length, order);
  if (order % 2 == 1) {
    tmp[half] = 0.0;  // Nyquist has no well-defined odd derivative
  } else {
    tmp[half] *= ik_power(static_cast<double>(half) * kTwoPi / g.length, order);
  }
  irfft(tmp, out.values());
}

Field deriv(const Field& f, int order) {
  if (order < 1 || order > 4) throw std::invalid_argument("deriv: order must be in 1..4");
  Field out(f.grid_ptr());
  std::vector<std::complex<double>> spec;
  field_spectrum(f, spec);
  spectrum_deriv_into(f.grid(), spec, order, out);
  return out;
}

double mean(const Field& f) {
  double acc = 0.0;
  for (double v : f.values()) acc += v;
  return acc / static_cast<double>(f.size());
}

double sobolev_seminorm(const Field& f, int s) {
  if (s < 0) throw std::invalid_argument("sobolev_seminorm: s must be nonnegative");
  std::vector<std::complex<double>> spec;
  field_spectrum(f, spec);
  const std::size_t half = f.size() / 2;
  const double kscale = kTwoPi / f.grid().length;
  double acc = 0.0;
  for (std::size_t k = 0; k <= half; ++k) {
    const double kk = kscale * static_cast<double>(k);
    double weight = 1.0;
    for (int j = 0; j < s; ++j) weight *= kk * kk;
    const double mag2 = std::norm(spec[k]);
    acc += (k == 0 || k == half ? 1.0 : 2.0) * weight * mag2;
  }
  return std::sqrt(f.grid().length * acc);
}

double l2_norm(const Field& f) {
  double acc = 0.0;
  for (double v : f.values()) acc += v * v;
  return std::sqrt(f.grid().dx * acc);
}

void dealias_spectrum(const Grid& g, std::span<std::complex<double>> spec) {
  const std::size_t cutoff = g.n / 3;
  for (std::size_t k = cutoff + 1; k < spec.size(); ++k) spec[k] = 0.0;
}

}  // namespace mrelax
