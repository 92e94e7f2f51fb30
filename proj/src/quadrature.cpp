#include "superres/quadrature.hpp"

#include <cmath>
#include <cstdio>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "superres/common.hpp"

namespace superres {

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol, unsigned max_depth) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  QuadratureResult r;
  double l1 = 0.0;
  // Boost's tolerance is relative to the L1 norm; all integrands here have L1 <= 1,
  // so this is at least as strict as abs_tol. The acceptance test below is absolute.
  r.value = GK::integrate(f, a, b, max_depth, abs_tol, &r.error, &l1);
  if (!std::isfinite(r.value) || r.error > abs_tol * std::max(1.0, l1)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "quadrature on [%g, %g] did not converge: error %.3g > %.3g", a,
                  b, r.error, abs_tol);
    throw NumericalError(buf, r.error);
  }
  return r;
}

}  // namespace superres
