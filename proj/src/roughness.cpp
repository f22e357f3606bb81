#include "rvol/roughness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rvol/stats.hpp"

namespace rvol {

namespace {

std::vector<double> log_values(const VolSeries& series) {
  series.validate();
  std::vector<double> lv(series.values.size());
  for (std::size_t i = 0; i < lv.size(); ++i)
    lv[i] = std::log(series.values[i]);
  return lv;
}

double structure_function_logs(const std::vector<double>& lv, double q,
                               int delta) {
  const std::size_t n = lv.size();
  if (!(q > 0.0)) throw std::invalid_argument("structure_function: q must be > 0");
  if (delta < 1 || static_cast<std::size_t>(delta) + 1 >= n)
    throw std::invalid_argument(
        "structure_function: delta must satisfy 1 <= delta <= N - 1 (N = " +
        std::to_string(n - 1) + " increments), got " + std::to_string(delta));

  const std::size_t count = n - static_cast<std::size_t>(delta);
  double sum = 0.0;
  for (std::size_t k = 0; k < count; ++k)
    sum += std::pow(std::fabs(lv[k + delta] - lv[k]), q);
  return sum / static_cast<double>(count);
}

}  // namespace

std::vector<int> EstimatorConfig::delta_grid() const {
  if (delta_min < 1 || delta_max < delta_min)
    throw std::invalid_argument("EstimatorConfig: need 1 <= delta_min <= delta_max");
  std::vector<int> d;
  d.reserve(static_cast<std::size_t>(delta_max - delta_min) + 1);
  for (int k = delta_min; k <= delta_max; ++k) d.push_back(k);
  return d;
}

double structure_function(const VolSeries& series, double q, int delta) {
  return structure_function_logs(log_values(series), q, delta);
}

ScalingReport fit_scaling(const VolSeries& series,
                          const std::vector<double>& q_grid,
                          const std::vector<int>& delta_grid) {
  if (q_grid.size() < 2)
    throw std::invalid_argument("fit_scaling: need at least 2 q values");
  if (delta_grid.size() < 3)
    throw std::invalid_argument("fit_scaling: need at least 3 deltas");
  for (double q : q_grid)
    if (!(q > 0.0)) throw std::invalid_argument("fit_scaling: q must be > 0");

  const std::vector<double> lv = log_values(series);

  ScalingReport report;
  report.q_grid = q_grid;
  report.delta_grid = delta_grid;
  report.m_table.assign(q_grid.size(),
                        std::vector<double>(delta_grid.size(), 0.0));

  // The m table cells are independent; fill per q (the per-delta increments
  // could be shared across q, but profiling has not justified it).
  for (std::size_t iq = 0; iq < q_grid.size(); ++iq)
    for (std::size_t id = 0; id < delta_grid.size(); ++id)
      report.m_table[iq][id] =
          structure_function_logs(lv, q_grid[iq], delta_grid[id]);

  std::vector<double> qs, zetas;
  for (std::size_t iq = 0; iq < q_grid.size(); ++iq) {
    std::vector<double> log_delta, log_m;
    for (std::size_t id = 0; id < delta_grid.size(); ++id) {
      const double m = report.m_table[iq][id];
      if (m > 0.0) {
        log_delta.push_back(std::log(static_cast<double>(delta_grid[id])));
        log_m.push_back(std::log(m));
      } else {
        report.warnings.push_back(
            "dropped cell q = " + std::to_string(q_grid[iq]) + ", delta = " +
            std::to_string(delta_grid[id]) + ": m = 0");
      }
    }
    if (log_delta.size() < 3)
      throw std::invalid_argument(
          "fit_scaling: fewer than 3 usable (m > 0) cells for q = " +
          std::to_string(q_grid[iq]));

    const OlsFit fit = ols_fit(log_delta, log_m);
    ZetaFit z;
    z.q = q_grid[iq];
    z.zeta = fit.slope;
    z.stderr_ = fit.slope_stderr;
    z.intercept = fit.intercept;
    z.r_squared = fit.r_squared;
    z.cells_used = static_cast<int>(log_delta.size());
    report.zeta.push_back(z);
    qs.push_back(z.q);
    zetas.push_back(z.zeta);
  }

  const OriginFit h = ols_fit_through_origin(qs, zetas);
  report.hurst_hat = h.slope;
  report.hurst_stderr = h.slope_stderr;
  return report;
}

ScalingReport fit_scaling(const VolSeries& series, const EstimatorConfig& cfg) {
  return fit_scaling(series, cfg.q_grid, cfg.delta_grid());
}

IncrementDiagnostics increment_diagnostics(const VolSeries& series, int delta,
                                           int bin_count) {
  const std::vector<double> lv = log_values(series);
  if (delta < 1 || static_cast<std::size_t>(delta) >= lv.size())
    throw std::invalid_argument("increment_diagnostics: delta out of range");

  std::vector<double> inc(lv.size() - static_cast<std::size_t>(delta));
  for (std::size_t k = 0; k < inc.size(); ++k)
    inc[k] = lv[k + delta] - lv[k];
  if (inc.size() < 30)
    throw std::invalid_argument(
        "increment_diagnostics: fewer than 30 increments (" +
        std::to_string(inc.size()) + "), diagnostics are meaningless");

  IncrementDiagnostics d;
  d.delta = delta;
  d.n_increments = inc.size();
  const Moments mom = compute_moments(inc);
  d.mean = mom.mean;
  d.stdev = mom.stdev;
  d.skewness = mom.skewness;
  d.excess_kurtosis = mom.excess_kurtosis;
  if (!(d.stdev > 0.0))
    throw std::invalid_argument(
        "increment_diagnostics: degenerate (constant) series");
  d.gauss_mean = d.mean;
  d.gauss_stdev = d.stdev;

  // Histogram. Freedman-Diaconis by default.
  std::vector<double> sorted = inc;
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();
  int nbins = bin_count;
  if (nbins <= 0) {
    const std::size_t n = sorted.size();
    const double q1 = sorted[n / 4];
    const double q3 = sorted[(3 * n) / 4];
    const double iqr = q3 - q1;
    const double width =
        2.0 * iqr / std::cbrt(static_cast<double>(n));
    nbins = width > 0.0
                ? static_cast<int>(std::ceil((hi - lo) / width))
                : 1;
    nbins = std::clamp(nbins, 1, 200);
  }
  d.bins.resize(static_cast<std::size_t>(nbins));
  const double span = (hi > lo) ? (hi - lo) : 1.0;
  for (int b = 0; b < nbins; ++b) {
    d.bins[b].lo = lo + span * static_cast<double>(b) / nbins;
    d.bins[b].hi = lo + span * static_cast<double>(b + 1) / nbins;
  }
  for (double x : inc) {
    int b = static_cast<int>((x - lo) / span * nbins);
    b = std::clamp(b, 0, nbins - 1);
    ++d.bins[b].count;
  }

  // fBm-implied overlay from the monofractal fit of the series itself:
  // variance nu^2 delta^(2H) with nu^2 = exp(intercept of the q = 2 line).
  EstimatorConfig cfg;
  cfg.delta_max = std::min<int>(40, static_cast<int>(lv.size()) - 2);
  if (cfg.delta_max < cfg.delta_min + 2) cfg.delta_max = cfg.delta_min + 2;
  const ScalingReport report = fit_scaling(series, cfg);
  d.fbm_hurst = report.hurst_hat;
  double intercept_q2 = 0.0;
  for (const auto& z : report.zeta)
    if (z.q == 2.0) intercept_q2 = z.intercept;
  d.fbm_nu = std::exp(0.5 * intercept_q2);
  d.fbm_stdev =
      d.fbm_nu * std::pow(static_cast<double>(delta), d.fbm_hurst);

  // Overlay densities sampled across the histogram range.
  const int kCurvePoints = 201;
  const double pad = 0.1 * span;
  const double gauss_norm = 1.0 / (d.gauss_stdev * std::sqrt(2.0 * 3.14159265358979323846));
  const double fbm_norm = 1.0 / (d.fbm_stdev * std::sqrt(2.0 * 3.14159265358979323846));
  for (int i = 0; i < kCurvePoints; ++i) {
    const double x = lo - pad + (span + 2.0 * pad) * i / (kCurvePoints - 1);
    const double zg = (x - d.gauss_mean) / d.gauss_stdev;
    const double zf = x / d.fbm_stdev;
    d.gauss_curve.emplace_back(x, gauss_norm * std::exp(-0.5 * zg * zg));
    d.fbm_curve.emplace_back(x, fbm_norm * std::exp(-0.5 * zf * zf));
  }
  return d;
}

}  // namespace rvol
