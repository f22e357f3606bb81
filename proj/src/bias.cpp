#include "rvol/bias.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rvol {

namespace {

// a^2 * w^exponent through logs, tolerant of intermediate under/overflow.
// Used for integrands of the form (small difference)^2 * (singular power).
double squared_times_power(double a, double w, double exponent) {
  a = std::fabs(a);
  if (a == 0.0) return 0.0;
  return std::exp(2.0 * std::log(a) + exponent * std::log(w));
}

// (x + y)^p - x^p without cancellation for y << x.
double pow_diff(double x, double y, double p) {
  if (x == 0.0) return std::pow(y, p);
  if (y > 0.5 * x) return std::pow(x + y, p) - std::pow(x, p);
  return std::pow(x, p) * std::expm1(p * std::log1p(y / x));
}

// Second difference (1+theta w)^p - (1+(theta-1)w)^p + (1-w)^p - 1. The
// direct form cancels at the O(theta w) level while the true value is
// O(theta w^2), so for small theta*w it is evaluated instead as
//   int_{-1}^{theta-1} D'(x) dx,  D'(x) = p w ((1+(x+1)w)^(p-1) - (1+xw)^(p-1)),
// whose integrand is sign-definite and stable; a fixed 15-point Kronrod rule
// is exact to machine precision there (the integrand varies on the x-scale
// 1/w, far wider than the interval).
double second_difference(double w, double theta, double p) {
  if (theta * w > 1e-2)
    return std::expm1(p * std::log1p(theta * w)) -
           std::expm1(p * std::log1p((theta - 1.0) * w)) +
           std::expm1(p * std::log1p(-w));

  static constexpr double nodes[8] = {
      0.991455371120813, 0.949107912342759, 0.864864423359769,
      0.741531185599394, 0.586087235467691, 0.405845151377397,
      0.207784955007898, 0.000000000000000};
  static constexpr double weights[8] = {
      0.022935322010529, 0.063092092629979, 0.104790010322250,
      0.140653259715525, 0.169004726639267, 0.190350578064785,
      0.204432940075298, 0.209482141084728};
  const double mid = 0.5 * (theta - 2.0);  // midpoint of [-1, theta-1]
  const double half = 0.5 * theta;
  auto deriv = [&](double x) {
    const double base = 1.0 + x * w;  // >= 1 - w > 0 on the interval
    return std::pow(base, p - 1.0) *
           std::expm1((p - 1.0) * std::log1p(w / base));
  };
  double sum = weights[7] * deriv(mid);
  for (int i = 0; i < 7; ++i)
    sum += weights[i] *
           (deriv(mid - half * nodes[i]) + deriv(mid + half * nodes[i]));
  return p * w * half * sum;
}

void check_hurst(double hurst) {
  if (!(hurst > 0.0 && hurst < 1.0))
    throw std::invalid_argument("bias: hurst must be in (0, 1), got " +
                                std::to_string(hurst));
}

}  // namespace

void BiasParams::validate() const {
  check_hurst(hurst);
  if (!(nu > 0.0)) throw std::invalid_argument("BiasParams: nu must be > 0");
  if (!(v0 > 0.0)) throw std::invalid_argument("BiasParams: v0 must be > 0");
}

BiasValue c_h_detailed(double hurst, double abs_tol) {
  check_hurst(hurst);
  const double hm = hurst - 0.5;

  // int_0^1 (1-s)^(2H-1) ds, flipped so the singularity sits at 0.
  const QuadratureResult piece1 = integrate_adaptive(
      [&](double v) { return std::pow(v, 2.0 * hurst - 1.0); }, 0.0, 1.0,
      abs_tol);

  // Tail integral after s = -u/(1-u):
  //   int_0^1 (1-u)^(-1-2H) (1 - u^(H-1/2))^2 du,
  // split at 1/2 with the upper half flipped (w = 1-u) so both endpoint
  // singularities are at 0, where bisection keeps absolute resolution.
  const QuadratureResult lower = integrate_adaptive(
      [&](double u) {
        const double d = 1.0 - std::pow(u, hm);
        return std::pow(1.0 - u, -1.0 - 2.0 * hurst) * d * d;
      },
      0.0, 0.5, 0.5 * abs_tol);
  const QuadratureResult upper = integrate_adaptive(
      [&](double w) {
        // u = 1 - w; 1 - u^(H-1/2) = -expm1((H-1/2) log1p(-w))
        const double d = std::expm1(hm * std::log1p(-w));
        return squared_times_power(d, w, -1.0 - 2.0 * hurst);
      },
      0.0, 0.5, 0.5 * abs_tol);

  const double variance = piece1.value + lower.value + upper.value;
  const double variance_err =
      piece1.error_bound + lower.error_bound + upper.error_bound;

  BiasValue out;
  out.value = 1.0 / std::sqrt(variance);
  // d c / d V = -c / (2 V)
  out.error_bound = 0.5 * out.value * variance_err / variance;
  return out;
}

double c_h(double hurst) { return c_h_detailed(hurst).value; }

BiasValue f1(double theta, double hurst, double abs_tol) {
  check_hurst(hurst);
  if (!(theta > 0.0)) throw std::invalid_argument("f1: theta must be > 0");
  const double p = hurst + 0.5;

  // After s = -u/(1-u) the integrand becomes G(u)^2 (1-u)^(-2H-3) with
  //   G(u) = (1 + theta(1-u))^p - 1 - (u + theta(1-u))^p + u^p.
  // Both brackets are differences of nearby powers near the endpoints, so
  // they are formed with expm1/log1p to survive the cancellation.
  auto lower_integrand = [&](double u) {
    const double y = theta * (1.0 - u);
    const double g = std::expm1(p * std::log1p(y)) - pow_diff(u, y, p);
    const double one_m_u = 1.0 - u;
    return g * g * std::pow(one_m_u, -2.0 * hurst - 3.0);
  };
  // Flipped half, w = 1 - u:
  //   G = (1+theta w)^p - (1 + (theta-1) w)^p + (1-w)^p - 1.
  auto upper_integrand = [&](double w) {
    const double g = second_difference(w, theta, p);
    return squared_times_power(g, w, -2.0 * hurst - 3.0);
  };

  // The raw integrals scale like theta^2 (they are divided out below), so
  // the tolerance must be scaled the same way or small theta degenerates.
  const double tol = 0.5 * abs_tol * theta * theta;
  const QuadratureResult lower = integrate_adaptive(lower_integrand, 0.0, 0.5, tol);
  const QuadratureResult upper = integrate_adaptive(upper_integrand, 0.0, 0.5, tol);

  const double inv_t2 = 1.0 / (theta * theta);
  return {(lower.value + upper.value) * inv_t2,
          (lower.error_bound + upper.error_bound) * inv_t2};
}

BiasValue f2(double theta, double hurst, double abs_tol) {
  check_hurst(hurst);
  if (!(theta > 0.0)) throw std::invalid_argument("f2: theta must be > 0");
  const double p = hurst + 0.5;

  // With v = 1 - s: theta^-2 int_0^1 ((v+theta)^p - v^p)^2 dv. As in f1,
  // the tolerance follows the theta^2 scale of the raw integral.
  const QuadratureResult r = integrate_adaptive(
      [&](double v) {
        const double d = pow_diff(v, theta, p);
        return d * d;
      },
      0.0, 1.0, abs_tol * theta * theta);

  const double inv_t2 = 1.0 / (theta * theta);
  return {r.value * inv_t2, r.error_bound * inv_t2};
}

BiasValue bias_factor(double theta, double hurst, double abs_tol) {
  const BiasValue c = c_h_detailed(hurst, abs_tol);
  const BiasValue v1 = f1(theta, hurst, abs_tol);
  const BiasValue v2 = f2(theta, hurst, abs_tol);
  const double p = hurst + 0.5;
  const double scale = (c.value * c.value) / (p * p);

  BiasValue out;
  out.value = scale * (v1.value + v2.value);
  out.error_bound = scale * (v1.error_bound + v2.error_bound) +
                    2.0 * out.value * c.error_bound / c.value;
  return out;
}

double biased_second_moment(double delta, double tau, const BiasParams& params) {
  params.validate();
  if (!(delta > 0.0) || !(tau > 0.0))
    throw std::invalid_argument("biased_second_moment: delta and tau must be > 0");
  const BiasValue f = bias_factor(tau / delta, params.hurst);
  return params.nu * params.nu * std::pow(delta, 2.0 * params.hurst) * f.value;
}

BiasCurve bias_curve(double hurst, double theta_min, double theta_max,
                     int n_points) {
  check_hurst(hurst);
  if (!(theta_min > 0.0) || !(theta_max > theta_min) || n_points < 2)
    throw std::invalid_argument("bias_curve: bad theta grid");

  const BiasValue c = c_h_detailed(hurst);
  const double p = hurst + 0.5;
  const double scale = (c.value * c.value) / (p * p);

  BiasCurve curve;
  curve.h_used = hurst;
  curve.theta_grid.resize(static_cast<std::size_t>(n_points));
  curve.f_values.resize(static_cast<std::size_t>(n_points));
  curve.error_bounds.resize(static_cast<std::size_t>(n_points));

  const double log_lo = std::log(theta_min);
  const double log_hi = std::log(theta_max);
  for (int i = 0; i < n_points; ++i) {
    const double theta =
        std::exp(log_lo + (log_hi - log_lo) * i / (n_points - 1));
    const BiasValue v1 = f1(theta, hurst);
    const BiasValue v2 = f2(theta, hurst);
    curve.theta_grid[i] = theta;
    curve.f_values[i] = scale * (v1.value + v2.value);
    curve.error_bounds[i] =
        scale * (v1.error_bound + v2.error_bound) +
        2.0 * curve.f_values[i] * c.error_bound / c.value;
  }
  return curve;
}

}  // namespace rvol
