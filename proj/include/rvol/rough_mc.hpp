#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "rvol/fbm.hpp"
#include "rvol/roughness.hpp"
#include "rvol/series.hpp"

namespace rvol {

// Business days per year used to convert the lab's day grid to the
// annualized units option prices are quoted in. The Hurst estimates are
// invariant to this convention (log-vol increments do not see the scale).
inline constexpr double kTradingDaysPerYear = 252.0;

// Jump-free, leverage-free rough volatility model on a daily grid:
// sigma_t = sigma0 * exp(eta * W^H_t), with eta per day^H and sigma0 in
// annualized vol units.
struct RoughModel {
  double hurst = 0.04;
  double eta = 1.0;
  double sigma0 = 0.2;
  int horizon_days = 1000;

  void validate() const;
};

struct McConfig {
  int n_paths = 10000;                  // M
  std::vector<int> taus = {1, 5, 10, 20};  // times to maturity, days
  std::uint64_t base_seed = 42;

  void validate() const;
  int max_tau() const;
};

struct HurstEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

struct ExperimentResult {
  VolSeries spot_series;
  std::map<int, VolSeries> implied_series;       // tau -> daily implied vols
  std::map<int, HurstEstimate> hurst_by_tau;
  HurstEstimate spot_hurst;
};

// Grid covering the spot horizon plus the longest maturity. The factor cap
// is lifted to whatever the experiment needs.
FbmGrid build_experiment_grid(const RoughModel& model, const McConfig& config);

struct SpotVol {
  VolSeries series;  // sigma at days 1..horizon_days
  FbmPath path;      // the underlying fBm path (length horizon + max tau)
};

// sigma_i = sigma0 * exp(eta * W^H at day i); deterministic in the seed.
SpotVol simulate_spot_vol(const RoughModel& model, const FbmGrid& grid,
                          std::uint64_t seed);

// Conditional-Monte-Carlo ATM call prices at one day, for several maturities
// at once. For each of the M paths, the volatility is continued conditional
// on the master path's innovations up to `day`, the realized root-mean-square
// volatility over the next tau days is formed, and a Black-Scholes price at
// that vol (S = strike = 1, zero rate) is averaged. Continuation innovations
// come from substreams keyed by (day, path index), so the price for a given
// tau is the same whether it is computed alone or batched with longer
// maturities, and is independent of any worker layout.
// price_stderr (optional) receives the Monte Carlo standard error per tau.
std::vector<double> atm_prices_at(const FbmPath& master, int day,
                                  const std::vector<int>& taus,
                                  const RoughModel& model,
                                  const McConfig& config,
                                  std::vector<double>* price_stderr = nullptr);

double atm_price_at(const FbmPath& master, int day, int tau,
                    const RoughModel& model, const McConfig& config);

// One implied vol per (day, tau), day = 1..horizon. Parallel over days;
// inversion failures are rethrown with (day, tau) context.
std::map<int, VolSeries> implied_vol_series(const RoughModel& model,
                                            const McConfig& config,
                                            int workers = 0);

// Full bias experiment: spot path, implied series per tau, and the Hurst
// estimate per tau from fit_scaling.
ExperimentResult hurst_vs_tau(const RoughModel& model, const McConfig& config,
                              const EstimatorConfig& estimator = {},
                              int workers = 0);

}  // namespace rvol
