#pragma once

#include <functional>

namespace superres {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

// Adaptive Gauss-Kronrod (7/15) on [a, b]. Converges when the error estimate
// is below abs_tol; otherwise throws NumericalError carrying the estimate.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol = 1e-13, unsigned max_depth = 20);

}  // namespace superres
