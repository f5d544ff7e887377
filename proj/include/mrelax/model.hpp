#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "mrelax/grid.hpp"

namespace mrelax {

// Model constants. gamma is restricted to (1, 2); values above 1.98 are
// rejected because the relaxation-variable exponent 2/(2-gamma) would exceed
// 100 and overflow every power in sight.
struct Params {
  double gamma = 1.5;
  double b0 = 1.0;
  double epsilon = 0.0;
};

// Throws ConfigError when the constants are outside the admissible range.
void validate_params(const Params& p);

// rho^gamma via exp(gamma*log(rho)); callers guarantee rho > 0.
inline double pow_gamma(double rho, double gamma) {
  return std::exp(gamma * std::log(rho));
}

struct State {
  Field rho;
  Field b;
  double time = 0.0;
};

struct Velocity {
  Field ux;
  Field uz;  // uy is identically zero under planar symmetry
};

struct RhsWorkspace {
  std::vector<std::complex<double>> spec_p, spec_b, spec_flux, spec_rho;
  Field pressure_term, dp_dx, db_dx, flux;
  void bind(const GridPtr& g);
};

// Semidiscrete right-hand side in conservative flux form:
//   drho = dxx(rho^gamma/gamma + b^2/2) - eps*dxxxx(rho)
//   db   = dx((b/rho)*dx(rho^gamma/gamma + b^2/2) + (b0^2/rho)*dx(b)) - eps*dxxxx(b)
// The outer derivative is applied last, so discrete means of drho and db vanish
// to roundoff. Throws VacuumError if min rho is not strictly positive.
void rhs(const State& s, const Params& p, Field& drho, Field& db, RhsWorkspace& ws,
         bool dealias = false);
std::pair<Field, Field> rhs(const State& s, const Params& p, bool dealias = false);

// ux = -(rho^(gamma-1)*dx(rho) + b*dx(b))/rho, uz = b0*dx(b)/rho.
Velocity velocity(const State& s, const Params& p);

struct Mat2 {
  double a11, a12, a21, a22;
  double trace() const { return a11 + a22; }
  double det() const { return a11 * a22 - a12 * a21; }
};

// Quasilinear second-order coefficient matrix [[rho^(g-1), b], [rho^(g-2) b, (b^2+b0^2)/rho]];
// its eigenvalues are the relaxation-variable coefficients alpha and beta.
Mat2 diffusion_matrix(double rho, double b, const Params& p);

// Index of the minimum of rho, for vacuum reports.
std::size_t argmin_rho(const Field& rho);

}  // namespace mrelax
