#include "rvol/stats.hpp"

#include <algorithm>
#include <cmath>

namespace rvol {

OlsFit ols_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("ols_fit: size mismatch");
  const std::size_t n = x.size();
  if (n < 3) throw std::invalid_argument("ols_fit: need at least 3 points");

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) throw std::invalid_argument("ols_fit: degenerate x values");

  OlsFit fit;
  fit.n = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;

  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    rss += r * r;
  }
  const double s2 = rss / static_cast<double>(n - 2);
  fit.slope_stderr = std::sqrt(s2 / sxx);
  fit.r_squared = (syy > 0.0) ? 1.0 - rss / syy : 1.0;
  return fit;
}

OriginFit ols_fit_through_origin(std::span<const double> x,
                                 std::span<const double> y) {
  if (x.size() != y.size())
    throw std::invalid_argument("ols_fit_through_origin: size mismatch");
  const std::size_t n = x.size();
  if (n < 2)
    throw std::invalid_argument("ols_fit_through_origin: need at least 2 points");

  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  if (sxx <= 0.0)
    throw std::invalid_argument("ols_fit_through_origin: degenerate x values");

  OriginFit fit;
  fit.n = n;
  fit.slope = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - fit.slope * x[i];
    rss += r * r;
  }
  fit.slope_stderr = std::sqrt(rss / static_cast<double>(n - 1) / sxx);
  return fit;
}

Moments compute_moments(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("compute_moments: need at least 2 points");

  Moments m;
  m.n = n;
  for (double v : x) m.mean += v;
  m.mean /= static_cast<double>(n);

  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - m.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m.variance = m2 / static_cast<double>(n - 1);
  m.stdev = std::sqrt(m.variance);
  m2 /= static_cast<double>(n);
  m3 /= static_cast<double>(n);
  m4 /= static_cast<double>(n);
  if (m2 > 0.0) {
    m.skewness = m3 / std::pow(m2, 1.5);
    m.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return m;
}

double mean_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean_of(x);
  double s = 0.0;
  for (double v : x) {
    const double d = v - m;
    s += d * d;
  }
  return s / static_cast<double>(x.size() - 1);
}

double median_of(std::vector<double> x) {
  if (x.empty()) throw std::invalid_argument("median_of: empty input");
  const std::size_t mid = x.size() / 2;
  std::nth_element(x.begin(), x.begin() + mid, x.end());
  double hi = x[mid];
  if (x.size() % 2 == 1) return hi;
  std::nth_element(x.begin(), x.begin() + mid - 1, x.begin() + mid);
  return 0.5 * (x[mid - 1] + hi);
}

}  // namespace rvol
