#pragma once

#include <vector>

#include "rvol/quadrature.hpp"

namespace rvol {

// Parameters of the linearized rough variance model v_u = v0 + nu * W^H_u
// behind the maturity-smoothing analysis.
struct BiasParams {
  double hurst = 0.04;
  double nu = 1.0;
  double v0 = 0.04;

  void validate() const;
};

struct BiasValue {
  double value = 0.0;
  double error_bound = 0.0;  // propagated quadrature error
};

// Normalizing constant of the Mandelbrot-Van Ness representation, fixed so
// that Var[W^H_1] = 1:
//   c_H^2 * [ int_0^1 (1-s)^(2H-1) ds
//           + int_{-inf}^0 ((1-s)^(H-1/2) - (-s)^(H-1/2))^2 ds ] = 1.
// Both integrals are evaluated by adaptive quadrature; the improper tail is
// mapped to the unit interval by s = -u/(1-u) and each piece is arranged so
// its endpoint singularity sits at 0.
BiasValue c_h_detailed(double hurst, double abs_tol = 1e-10);
double c_h(double hurst);

// The two scale functions of the smoothed second moment, theta = tau/delta:
//   f1(theta) = theta^-2 * int_{-inf}^0 ((1+theta-s)^(H+1/2) - (1-s)^(H+1/2)
//                                      - (theta-s)^(H+1/2) + (-s)^(H+1/2))^2 ds
//   f2(theta) = theta^-2 * int_0^1 ((1+theta-s)^(H+1/2) - (1-s)^(H+1/2))^2 ds
BiasValue f1(double theta, double hurst, double abs_tol = 1e-10);
BiasValue f2(double theta, double hurst, double abs_tol = 1e-10);

// Multiplicative smoothing bias f(theta) = c_H^2/(H+1/2)^2 (f1 + f2);
// tends to 1 as theta -> 0.
BiasValue bias_factor(double theta, double hurst, double abs_tol = 1e-10);

// Lag-delta second moment of the tau-smoothed variance proxy:
// m_hat(2, delta) = nu^2 delta^(2H) f(tau/delta).
double biased_second_moment(double delta, double tau, const BiasParams& params);

struct BiasCurve {
  double h_used = 0.0;
  std::vector<double> theta_grid;
  std::vector<double> f_values;
  std::vector<double> error_bounds;
};

// f(theta) on a logarithmic grid (c_H evaluated once for the whole curve).
BiasCurve bias_curve(double hurst, double theta_min = 1e-2,
                     double theta_max = 1e2, int n_points = 200);

}  // namespace rvol
