#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace rvol {

// Ordinary least squares of y on x (with intercept).
struct OlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double r_squared = 0.0;
  std::size_t n = 0;
};

OlsFit ols_fit(std::span<const double> x, std::span<const double> y);

// Least squares through the origin: y = slope * x.
struct OriginFit {
  double slope = 0.0;
  double slope_stderr = 0.0;
  std::size_t n = 0;
};

OriginFit ols_fit_through_origin(std::span<const double> x,
                                 std::span<const double> y);

// Sample moments. Skewness and excess kurtosis use the plain moment ratios
// m3/m2^1.5 and m4/m2^2 - 3.
struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased (n-1)
  double stdev = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

Moments compute_moments(std::span<const double> x);

double mean_of(std::span<const double> x);
double sample_variance(std::span<const double> x);
double median_of(std::vector<double> x);  // by value: partially sorts a copy

}  // namespace rvol
