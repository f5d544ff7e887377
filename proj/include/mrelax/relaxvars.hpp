#pragma once

#include <vector>

#include "mrelax/model.hpp"
#include "mrelax/quadrature.hpp"

namespace mrelax {
namespace relaxvars {

// Extended real: a finite value or the distinguished +infinity branch.
// `infinite` is set only by the exact branch predicates (b == 0 together with
// the sign of rho^gamma - b0^2), never by floating-point overflow; `value` may
// still overflow to an IEEE inf for extreme finite-branch inputs.
struct ExtReal {
  double value = 0.0;
  bool infinite = false;
  static ExtReal inf() { return {0.0, true}; }
  static ExtReal of(double v) { return {v, false}; }
};

// Characteristic roots of the quasilinear system. f > 2 and g > 0 whenever
// finite; f is infinite exactly on {b = 0, rho^gamma <= b0^2} and g exactly on
// {b = 0, rho^gamma >= b0^2}.
ExtReal eval_f(double rho, double b, const Params& p);
ExtReal eval_g(double rho, double b, const Params& p);

// Diagonalizing potentials. w uses the original closed form for f <= 4 and the
// rewritten all-positive form for f > 4; z always uses the all-positive form.
// The one-dimensional integrals are evaluated by adaptive Gauss-Kronrod plus a
// termwise tail expansion for arguments beyond 16. Throws QuadratureError on
// non-convergence, never returns a silently wrong value.
ExtReal eval_w(double rho, double b, const Params& p, const QuadOptions& q = {});
ExtReal eval_z(double rho, double b, const Params& p, const QuadOptions& q = {});

// W = exp(-w), Z = exp(-z); exp(-inf) = 0 on the infinite branches.
double eval_W(double rho, double b, const Params& p, const QuadOptions& q = {});
double eval_Z(double rho, double b, const Params& p, const QuadOptions& q = {});

// Diffusion eigenvalues: alpha = (b^2+b0^2)/rho + 2 rho^(gamma-1)/f (limit
// b0^2/rho when f = inf), beta = (b0^2/rho) g/(g+2) (limit b0^2/rho when
// g = inf). Both strictly positive.
double eval_alpha(double rho, double b, const Params& p);
double eval_beta(double rho, double b, const Params& p);

// Pointwise bundle of everything above.
struct RelaxPoint {
  double rho, b;
  ExtReal f, g, w, z;
  double bigW, bigZ;
  double alpha, beta;
};
RelaxPoint eval_point(double rho, double b, const Params& p, const QuadOptions& q = {});

// First and second partial derivatives, in W-scaled form (each entry divided
// by W = e^{-w}); these stay representable where W itself over/underflows.
// On the infinite-branch set the unscaled derivatives are exactly zero.
struct ScaledDerivs {
  bool infinite = false;
  double w = 0.0;  // the potential itself (finite branch)
  double d_rho = 0.0, d_b = 0.0;
  double d_rho_rho = 0.0, d_rho_b = 0.0, d_b_b = 0.0;
};
ScaledDerivs scaled_derivs_W(double rho, double b, const Params& p, const QuadOptions& q = {});
ScaledDerivs scaled_derivs_Z(double rho, double b, const Params& p, const QuadOptions& q = {});

struct DerivBundle {
  double d_rho = 0.0, d_b = 0.0;
  double d_rho_rho = 0.0, d_rho_b = 0.0, d_b_b = 0.0;
};
// Unscaled derivatives of W and Z (zero on the respective infinite branch;
// entries are clamped to zero when w > 745 where e^{-w} underflows to 0).
DerivBundle grad_hess_W(double rho, double b, const Params& p, const QuadOptions& q = {});
DerivBundle grad_hess_Z(double rho, double b, const Params& p, const QuadOptions& q = {});

// Named accessors; the gradient lives in d_rho/d_b, the Hessian in the rest.
inline DerivBundle grad_W(double rho, double b, const Params& p, const QuadOptions& q = {}) {
  return grad_hess_W(rho, b, p, q);
}
inline DerivBundle grad_Z(double rho, double b, const Params& p, const QuadOptions& q = {}) {
  return grad_hess_Z(rho, b, p, q);
}
inline DerivBundle hess_W(double rho, double b, const Params& p, const QuadOptions& q = {}) {
  return grad_hess_W(rho, b, p, q);
}
inline DerivBundle hess_Z(double rho, double b, const Params& p, const QuadOptions& q = {}) {
  return grad_hess_Z(rho, b, p, q);
}

// Gradients of f and g on their finite branches (rationalized closed forms,
// evaluated cancellation-free on both sides of E = b^2 - b0^2 + rho^gamma).
struct Grad2 {
  double d_rho, d_b;
};
Grad2 grad_f(double rho, double b, const Params& p);
Grad2 grad_g(double rho, double b, const Params& p);
// Gradients of w and z on their finite branches.
Grad2 grad_w(double rho, double b, const Params& p);
Grad2 grad_z(double rho, double b, const Params& p);

// Envelope inversions: the bounds on rho and |B| implied by lower envelopes
// of w and z. They rely on the exact monotonicities of the derivative
// catalogue: w and z decrease in |B|; along B = 0, w decreases in rho on
// {rho^gamma > b0^2} and z increases in rho on {rho^gamma < b0^2}.
//   w(rho, B) >= w0 everywhere  =>  rho <= rho_upper_from_w(w0)
//                                   and |B| <= b_bound_from_w(w0)
//   z(rho, B) >= z0 everywhere  =>  rho >= rho_lower_from_z(z0)
// All by bisection on the monotone profiles; w0 is unrestricted, z0 must be
// positive.
double rho_upper_from_w(double w0, const Params& p, const QuadOptions& q = {});
double rho_lower_from_z(double z0, const Params& p, const QuadOptions& q = {});
double b_bound_from_w(double w0, const Params& p, const QuadOptions& q = {});

// Roots of  b_bar zeta^2 + ((b_bar^2+b0^2-rho_bar^gamma)/rho_bar) zeta
//             - rho_bar^(gamma-2) b_bar = 0,
// computed larger-magnitude-first, the other from the product -rho_bar^(gamma-2).
// zeta1 carries the +sqrt sign of the quadratic formula. Requires b_bar != 0.
struct ZetaPair {
  double zeta1, zeta2;
};
ZetaPair zeta_roots(double rho_bar, double b_bar, const Params& p);

// Dense sampling of W or Z for external contouring. branch: 0 = finite,
// 1 = infinite (value reported as 0), 2 = evaluation error (value NaN).
enum class LevelWhich { W, Z };
struct LevelPoint {
  double rho, b, value;
  int branch;
};
std::vector<LevelPoint> level_grid(const Params& p, double rho_lo, double rho_hi, int n_rho,
                                   double b_lo, double b_hi, int n_b, LevelWhich which,
                                   const QuadOptions& q = {});

}  // namespace relaxvars
}  // namespace mrelax
