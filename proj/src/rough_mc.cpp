#include "rvol/rough_mc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rvol/black_scholes.hpp"
#include "rvol/parallel.hpp"

namespace rvol {

void RoughModel::validate() const {
  if (!(hurst > 0.0 && hurst < 1.0))
    throw std::invalid_argument("RoughModel: hurst must be in (0, 1)");
  if (!(eta >= 0.0)) throw std::invalid_argument("RoughModel: eta must be >= 0");
  if (!(sigma0 > 0.0))
    throw std::invalid_argument("RoughModel: sigma0 must be > 0");
  if (horizon_days < 1)
    throw std::invalid_argument("RoughModel: horizon_days must be >= 1");
}

void McConfig::validate() const {
  if (n_paths < 100)
    throw std::invalid_argument(
        "McConfig: n_paths must be >= 100 (price noise dominates below)");
  if (taus.empty()) throw std::invalid_argument("McConfig: taus is empty");
  for (int t : taus)
    if (t < 1) throw std::invalid_argument("McConfig: taus must be >= 1 day");
}

int McConfig::max_tau() const {
  return *std::max_element(taus.begin(), taus.end());
}

FbmGrid build_experiment_grid(const RoughModel& model, const McConfig& config) {
  model.validate();
  config.validate();
  const int n = model.horizon_days + config.max_tau();
  FbmGrid::Options opts;
  opts.max_n = std::max(opts.max_n, n);
  return FbmGrid::build(model.hurst, n, 1.0, opts);
}

SpotVol simulate_spot_vol(const RoughModel& model, const FbmGrid& grid,
                          std::uint64_t seed) {
  model.validate();
  if (grid.size() < model.horizon_days)
    throw std::invalid_argument("simulate_spot_vol: grid shorter than horizon");

  SpotVol out;
  out.path = sample_path(grid, seed);
  std::vector<double> sigma(static_cast<std::size_t>(model.horizon_days));
  for (int d = 0; d < model.horizon_days; ++d)
    sigma[d] = model.sigma0 * std::exp(model.eta * out.path.values[d]);
  out.series = VolSeries::from_values(std::move(sigma));
  return out;
}

namespace {

// eta = 0 collapses every continuation to the constant sigma0; priced
// directly so the degenerate case does not depend on MC noise.
double deterministic_price(double sigma0, int tau) {
  return bs_call_price(
      {1.0, 1.0, static_cast<double>(tau) / kTradingDaysPerYear, sigma0, 1.0});
}

}  // namespace

std::vector<double> atm_prices_at(const FbmPath& master, int day,
                                  const std::vector<int>& taus,
                                  const RoughModel& model,
                                  const McConfig& config,
                                  std::vector<double>* price_stderr) {
  model.validate();
  if (master.grid == nullptr)
    throw std::invalid_argument("atm_prices_at: path has no grid");
  if (taus.empty()) throw std::invalid_argument("atm_prices_at: no maturities");
  const int tau_max = *std::max_element(taus.begin(), taus.end());
  if (day < 1 || day + tau_max - 1 > master.grid->size())
    throw std::out_of_range("atm_prices_at: day " + std::to_string(day) +
                            " with max tau " + std::to_string(tau_max) +
                            " falls outside the grid");

  if (model.eta == 0.0) {
    std::vector<double> prices(taus.size());
    for (std::size_t i = 0; i < taus.size(); ++i)
      prices[i] = deterministic_price(model.sigma0, taus[i]);
    if (price_stderr) price_stderr->assign(taus.size(), 0.0);
    return prices;
  }

  if (tau_max == 1) {
    // The realized variance of a one-day option is today's (known) vol:
    // the conditional average collapses to a single Black-Scholes price.
    const double sigma_today =
        model.sigma0 * std::exp(model.eta * master.values[day - 1]);
    std::vector<double> prices(taus.size(),
                               deterministic_price(sigma_today, 1));
    if (price_stderr) price_stderr->assign(taus.size(), 0.0);
    return prices;
  }

  // Day d observes grid indices [0, d); its own vol (grid index d-1) is the
  // first, known term of the realized variance, and the remaining tau - 1
  // days are continued conditionally on the observed innovations. The
  // variance is anchored at the known current day, so a one-day option
  // prices off today's spot vol exactly and carries no MC noise.
  const std::size_t m = static_cast<std::size_t>(tau_max) - 1;
  const double sigma_today =
      model.sigma0 * std::exp(model.eta * master.values[day - 1]);
  std::vector<double> w(m), fresh(m), cum_var(m);
  std::vector<double> sum(taus.size(), 0.0), sum_sq(taus.size(), 0.0);

  const FbmConditioner cond(master, day, day + tau_max - 1);
  for (int path_index = 0; path_index < config.n_paths; ++path_index) {
    GaussianStream g(derive_seed(
        config.base_seed,
        {stream::kContinuation, static_cast<std::uint64_t>(day),
         static_cast<std::uint64_t>(path_index)}));
    cond.continue_with(g, w, fresh);

    double acc = sigma_today * sigma_today;
    for (std::size_t k = 0; k < m; ++k) {
      const double sigma = model.sigma0 * std::exp(model.eta * w[k]);
      acc += sigma * sigma;
      cum_var[k] = acc;
    }
    for (std::size_t i = 0; i < taus.size(); ++i) {
      const int tau = taus[i];
      if (tau == 1) continue;  // deterministic, handled below
      const double rms = std::sqrt(cum_var[tau - 2] / tau);
      const double price = bs_call_price(
          {1.0, 1.0, static_cast<double>(tau) / kTradingDaysPerYear, rms, 1.0});
      sum[i] += price;
      sum_sq[i] += price * price;
    }
  }

  const double inv_m = 1.0 / static_cast<double>(config.n_paths);
  std::vector<double> prices(taus.size());
  if (price_stderr) price_stderr->assign(taus.size(), 0.0);
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (taus[i] == 1) {
      prices[i] = deterministic_price(sigma_today, 1);
      continue;
    }
    prices[i] = sum[i] * inv_m;
    if (price_stderr) {
      const double var =
          std::max(0.0, (sum_sq[i] * inv_m - prices[i] * prices[i]) *
                            static_cast<double>(config.n_paths) /
                            std::max(1, config.n_paths - 1));
      (*price_stderr)[i] = std::sqrt(var * inv_m);
    }
  }
  return prices;
}

double atm_price_at(const FbmPath& master, int day, int tau,
                    const RoughModel& model, const McConfig& config) {
  return atm_prices_at(master, day, {tau}, model, config)[0];
}

namespace {

std::map<int, VolSeries> implied_from_spot(const SpotVol& spot,
                                           const RoughModel& model,
                                           const McConfig& config,
                                           int workers) {
  const int horizon = model.horizon_days;
  std::vector<std::vector<double>> implied(
      config.taus.size(), std::vector<double>(static_cast<std::size_t>(horizon)));

  parallel_for(static_cast<std::size_t>(horizon), workers, [&](std::size_t i) {
    const int day = static_cast<int>(i) + 1;
    const std::vector<double> prices =
        atm_prices_at(spot.path, day, config.taus, model, config);
    for (std::size_t t = 0; t < config.taus.size(); ++t) {
      const int tau = config.taus[t];
      try {
        implied[t][i] = bs_implied_vol(
            prices[t], 1.0, 1.0,
            static_cast<double>(tau) / kTradingDaysPerYear, 1.0);
      } catch (const ImpliedVolError& e) {
        throw std::runtime_error("implied_vol_series: inversion failed at day " +
                                 std::to_string(day) + ", tau = " +
                                 std::to_string(tau) + ": " + e.what());
      }
    }
  });

  std::map<int, VolSeries> out;
  for (std::size_t t = 0; t < config.taus.size(); ++t)
    out.emplace(config.taus[t], VolSeries::from_values(std::move(implied[t])));
  return out;
}

}  // namespace

std::map<int, VolSeries> implied_vol_series(const RoughModel& model,
                                            const McConfig& config,
                                            int workers) {
  model.validate();
  config.validate();
  const FbmGrid grid = build_experiment_grid(model, config);
  const SpotVol spot = simulate_spot_vol(
      model, grid, derive_seed(config.base_seed, {stream::kMasterPath}));
  return implied_from_spot(spot, model, config, workers);
}

ExperimentResult hurst_vs_tau(const RoughModel& model, const McConfig& config,
                              const EstimatorConfig& estimator, int workers) {
  model.validate();
  config.validate();

  // One factorization serves the whole experiment.
  const FbmGrid grid = build_experiment_grid(model, config);
  const SpotVol spot = simulate_spot_vol(
      model, grid, derive_seed(config.base_seed, {stream::kMasterPath}));

  ExperimentResult result;
  result.spot_series = spot.series;
  result.implied_series = implied_from_spot(spot, model, config, workers);

  const ScalingReport spot_fit = fit_scaling(result.spot_series, estimator);
  result.spot_hurst = {spot_fit.hurst_hat, spot_fit.hurst_stderr};
  for (const auto& [tau, series] : result.implied_series) {
    const ScalingReport fit = fit_scaling(series, estimator);
    result.hurst_by_tau[tau] = {fit.hurst_hat, fit.hurst_stderr};
  }
  return result;
}

}  // namespace rvol
