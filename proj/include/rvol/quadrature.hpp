#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace rvol {

struct QuadratureResult {
  double value = 0.0;
  double error_bound = 0.0;
  int intervals = 0;
  int evaluations = 0;
};

// Thrown when the adaptive scheme cannot reach the requested tolerance.
// Carries the best estimate and the error actually achieved.
struct QuadratureError : std::runtime_error {
  QuadratureError(const std::string& msg, double value, double achieved)
      : std::runtime_error(msg), value(value), achieved_error(achieved) {}
  double value;
  double achieved_error;
};

// Globally adaptive Gauss-Kronrod 7-15 on [a, b]. Intervals are kept in a
// priority queue and the worst one is bisected until the summed error
// estimate drops below abs_tol. Endpoint singularities are fine as long as
// they sit at a coordinate where bisection can keep resolving (in practice:
// put them at 0, where doubles have absolute rather than relative
// resolution); the integrand is never evaluated at the endpoints themselves.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double abs_tol = 1e-10,
                                    int max_intervals = 60000);

}  // namespace rvol
