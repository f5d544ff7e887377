#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

namespace mrelax {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Uniform periodic grid on the torus. Immutable once built; Fields keep a
// shared reference, so concurrent use on distinct Fields is safe.
struct Grid {
  std::size_t n = 0;
  double length = kTwoPi;
  double dx = 0.0;
  std::vector<double> points;       // x_j = j*dx
  std::vector<double> wavenumbers;  // fft layout: 0,1,..,n/2-1,-n/2,..,-1 (times 2*pi/length)
};

using GridPtr = std::shared_ptr<const Grid>;

// n must be even and >= 16 (the solver always uses powers of two), length > 0.
GridPtr make_grid(std::size_t n, double length = kTwoPi);

// Real samples on a Grid, one value per point.
class Field {
 public:
  Field() = default;
  explicit Field(GridPtr grid);
  Field(GridPtr grid, std::vector<double> values);

  static Field sample(const GridPtr& grid, const std::function<double(double)>& f);
  static Field constant(const GridPtr& grid, double c);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  bool all_finite() const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

// Spectral derivative of order 1..4. Forward transform, multiply by (ik)^order,
// inverse transform; the Nyquist bin is zeroed for odd orders.
Field deriv(const Field& f, int order);

// Arithmetic mean of the samples (the spectral zero mode).
double mean(const Field& f);

// sqrt(length * sum_k |k|^(2s) |f_k|^2); s = 0 gives the L2 norm.
double sobolev_seminorm(const Field& f, int s);

// sqrt(dx * sum_i f_i^2); equals sobolev_seminorm(f, 0) to roundoff by Parseval.
double l2_norm(const Field& f);

// Spectral-space helpers used by the model right-hand side.
void field_spectrum(const Field& f, std::vector<std::complex<double>>& out);
// out_i = (ik)^order-scaled inverse transform of spec on grid g.
void spectrum_deriv_into(const Grid& g, std::span<const std::complex<double>> spec, int order,
                         Field& out);
// Zero all modes with |k| > n/3 (2/3-rule truncation), in place.
void dealias_spectrum(const Grid& g, std::span<std::complex<double>> spec);

}  // namespace mrelax
