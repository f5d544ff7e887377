#pragma once

#include <functional>

namespace mrelax {

struct QuadOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_panels = 40000;
  int max_depth = 64;
};

// Adaptive Gauss-Kronrod 7/15 bisection on [a, b] (a <= b). Panels are
// accepted when the Kronrod/Gauss discrepancy is below the local tolerance;
// for single-sign integrands (the only kind used here) local relative
// acceptance bounds the global relative error. Throws QuadratureError when
// the panel budget or depth limit is exhausted before convergence.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadOptions& opt = {});

}  // namespace mrelax
