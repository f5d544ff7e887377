#include "mrelax/model.hpp"

#include <cmath>

#include "mrelax/errors.hpp"
#include "mrelax/fft.hpp"

namespace mrelax {

void validate_params(const Params& p) {
  if (!(p.gamma > 1.0 && p.gamma < 2.0))
    throw ConfigError("params: gamma must lie in the open interval (1, 2)");
  if (p.gamma > 1.98)
    throw ConfigError("params: gamma above 1.98 makes the exponent 2/(2-gamma) exceed 100");
  if (!(p.b0 != 0.0) || !std::isfinite(p.b0)) throw ConfigError("params: b0 must be nonzero");
  if (!(p.epsilon >= 0.0)) throw ConfigError("params: epsilon must be nonnegative");
}

void RhsWorkspace::bind(const GridPtr& g) {
  if (pressure_term.size() != g->n) {
    pressure_term = Field(g);
    dp_dx = Field(g);
    db_dx = Field(g);
    flux = Field(g);
  }
}

std::size_t argmin_rho(const Field& rho) {
  std::size_t arg = 0;
  double best = rho[0];
  for (std::size_t i = 1; i < rho.size(); ++i) {
    if (!(rho[i] >= best)) {  // also catches NaN
      best = rho[i];
      arg = i;
    }
  }
  return arg;
}

namespace {

void check_admissible(const State& s) {
  const std::size_t i = argmin_rho(s.rho);
  const double m = s.rho[i];
  if (!(m > 0.0))
    throw VacuumError(s.time, i, "vacuum breach: min rho = " + std::to_string(m) +
                                     " at grid index " + std::to_string(i));
}

}  // namespace

void rhs(const State& s, const Params& p, Field& drho, Field& db, RhsWorkspace& ws,
         bool dealias) {
  check_admissible(s);
  const GridPtr& g = s.rho.grid_ptr();
  ws.bind(g);
  const std::size_t n = g->n;
  const double inv_gamma = 1.0 / p.gamma;
  const double b0sq = p.b0 * p.b0;

  for (std::size_t i = 0; i < n; ++i) {
    const double r = s.rho[i];
    const double b = s.b[i];
    ws.pressure_term[i] = inv_gamma * pow_gamma(r, p.gamma) + 0.5 * b * b;
  }

  field_spectrum(ws.pressure_term, ws.spec_p);
  if (dealias) dealias_spectrum(*g, ws.spec_p);
  field_spectrum(s.b, ws.spec_b);

  spectrum_deriv_into(*g, ws.spec_p, 1, ws.dp_dx);
  spectrum_deriv_into(*g, ws.spec_b, 1, ws.db_dx);
  spectrum_deriv_into(*g, ws.spec_p, 2, drho);

  for (std::size_t i = 0; i < n; ++i) {
    const double inv_r = 1.0 / s.rho[i];
    ws.flux[i] = s.b[i] * inv_r * ws.dp_dx[i] + b0sq * inv_r * ws.db_dx[i];
  }
  field_spectrum(ws.flux, ws.spec_flux);
  if (dealias) dealias_spectrum(*g, ws.spec_flux);
  spectrum_deriv_into(*g, ws.spec_flux, 1, db);

  if (p.epsilon > 0.0) {
    Field hyper(g);
    field_spectrum(s.rho, ws.spec_rho);
    spectrum_deriv_into(*g, ws.spec_rho, 4, hyper);
    for (std::size_t i = 0; i < n; ++i) drho[i] -= p.epsilon * hyper[i];
    spectrum_deriv_into(*g, ws.spec_b, 4, hyper);
    for (std::size_t i = 0; i < n; ++i) db[i] -= p.epsilon * hyper[i];
  }
}

std::pair<Field, Field> rhs(const State& s, const Params& p, bool dealias) {
  Field drho(s.rho.grid_ptr()), db(s.rho.grid_ptr());
  RhsWorkspace ws;
  rhs(s, p, drho, db, ws, dealias);
  return {std::move(drho), std::move(db)};
}

Velocity velocity(const State& s, const Params& p) {
  check_admissible(s);
  const GridPtr& g = s.rho.grid_ptr();
  Field drho_dx = deriv(s.rho, 1);
  Field db_dx = deriv(s.b, 1);
  Velocity v{Field(g), Field(g)};
  for (std::size_t i = 0; i < g->n; ++i) {
    const double r = s.rho[i];
    const double inv_r = 1.0 / r;
    v.ux[i] = -(pow_gamma(r, p.gamma - 1.0) * drho_dx[i] + s.b[i] * db_dx[i]) * inv_r;
    v.uz[i] = p.b0 * db_dx[i] * inv_r;
  }
  return v;
}

Mat2 diffusion_matrix(double rho, double b, const Params& p) {
  if (!(rho > 0.0)) throw ConfigError("diffusion_matrix: rho must be positive");
  const double inv_r = 1.0 / rho;
  return Mat2{pow_gamma(rho, p.gamma - 1.0), b, pow_gamma(rho, p.gamma - 2.0) * b,
              (b * b + p.b0 * p.b0) * inv_r};
}

}  // namespace mrelax
