#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rvol/series.hpp"

namespace rvol {

// Per-q log-log regression of the structure function.
struct ZetaFit {
  double q = 0.0;
  double zeta = 0.0;       // slope of log m(q, delta) on log delta
  double stderr_ = 0.0;
  double intercept = 0.0;  // log c_q
  double r_squared = 0.0;
  int cells_used = 0;
};

struct ScalingReport {
  std::vector<double> q_grid;
  std::vector<int> delta_grid;
  // m_table[iq][id] = m(q_grid[iq], delta_grid[id]); always fully populated,
  // zero cells are excluded from the regressions only.
  std::vector<std::vector<double>> m_table;
  std::vector<ZetaFit> zeta;
  double hurst_hat = 0.0;     // zero-intercept slope of zeta(q) on q
  double hurst_stderr = 0.0;
  std::vector<std::string> warnings;  // dropped (q, delta) cells
};

struct EstimatorConfig {
  std::vector<double> q_grid{0.5, 1.0, 1.5, 2.0, 3.0};
  int delta_min = 1;
  int delta_max = 40;

  std::vector<int> delta_grid() const;
};

// Structure function m(q, delta): mean of |log sigma_{k+delta} - log
// sigma_k|^q over every admissible start index k (all k with k + delta <
// series length). Requires 1 <= delta <= N - 1 where N is the number of
// increments at lag one (series length - 1), so that at least two increments
// enter the mean.
double structure_function(const VolSeries& series, double q, int delta);

// Fits zeta(q) per q by OLS in log-log space, then the monofractal Hurst
// exponent as the zero-intercept slope of zeta(q) on q. Cells with m = 0 are
// dropped with a warning; a q with fewer than 3 usable cells is an error.
ScalingReport fit_scaling(const VolSeries& series, const EstimatorConfig& cfg);
ScalingReport fit_scaling(const VolSeries& series,
                          const std::vector<double>& q_grid,
                          const std::vector<int>& delta_grid);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

struct IncrementDiagnostics {
  int delta = 0;
  std::size_t n_increments = 0;
  double mean = 0.0;
  double stdev = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  std::vector<HistogramBin> bins;
  // Gaussian fitted to the increments (moment match).
  double gauss_mean = 0.0;
  double gauss_stdev = 0.0;
  // Gaussian implied by the monofractal fBm fit: zero mean, variance
  // nu_hat^2 * delta^(2 hurst_hat).
  double fbm_hurst = 0.0;
  double fbm_nu = 0.0;
  double fbm_stdev = 0.0;
  // Densities sampled over the histogram range, for external plotting.
  std::vector<std::pair<double, double>> gauss_curve;
  std::vector<std::pair<double, double>> fbm_curve;
};

// Moment and histogram diagnostics of the lag-delta log-increments, with the
// two overlay densities of the corresponding figure. bin_count = 0 selects
// the Freedman-Diaconis rule. Fewer than 30 increments, or a degenerate
// (constant) series, is an error.
IncrementDiagnostics increment_diagnostics(const VolSeries& series, int delta,
                                           int bin_count = 0);

}  // namespace rvol
