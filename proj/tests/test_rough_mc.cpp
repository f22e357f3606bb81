#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "rvol/black_scholes.hpp"
#include "rvol/quadrature.hpp"
#include "rvol/rough_mc.hpp"
#include "rvol/stats.hpp"

using namespace rvol;

TEST_CASE("eta = 0 degenerates to constant vol and exact BS prices") {
  RoughModel model;
  model.hurst = 0.3;
  model.eta = 0.0;
  model.sigma0 = 0.25;
  model.horizon_days = 30;
  McConfig config;
  config.n_paths = 200;
  config.taus = {1, 5};
  config.base_seed = 9;

  const FbmGrid grid = build_experiment_grid(model, config);
  const SpotVol spot = simulate_spot_vol(model, grid, 1);
  for (double v : spot.series.values) CHECK(v == doctest::Approx(0.25));

  const double p = atm_price_at(spot.path, 3, 1, model, config);
  CHECK(p == doctest::Approx(bs_call_price(
                 {1.0, 1.0, 1.0 / kTradingDaysPerYear, 0.25, 1.0})));

  const auto implied = implied_vol_series(model, config);
  for (const auto& [tau, series] : implied)
    for (double v : series.values)
      CHECK(v == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("log spot vol is exactly eta times the fBm path") {
  RoughModel model;
  model.hurst = 0.1;
  model.eta = 0.7;
  model.sigma0 = 1.0;
  model.horizon_days = 50;
  McConfig config;
  config.n_paths = 100;
  config.taus = {1};

  const FbmGrid grid = build_experiment_grid(model, config);
  const SpotVol spot = simulate_spot_vol(model, grid, 42);
  for (int d = 0; d < model.horizon_days; ++d)
    CHECK(std::log(spot.series.values[d]) ==
          doctest::Approx(0.7 * spot.path.values[d]).epsilon(1e-12));
}

TEST_CASE("experiment is deterministic and worker-count independent") {
  RoughModel model;
  model.hurst = 0.1;
  model.eta = 0.5;
  model.sigma0 = 0.2;
  model.horizon_days = 40;
  McConfig config;
  config.n_paths = 300;
  config.taus = {1, 3, 7};
  config.base_seed = 1001;

  const auto run1 = implied_vol_series(model, config, 1);
  const auto run2 = implied_vol_series(model, config, 2);
  const auto run8 = implied_vol_series(model, config, 8);
  const auto run1b = implied_vol_series(model, config, 1);

  for (const auto& [tau, series] : run1) {
    CHECK(series.values == run2.at(tau).values);
    CHECK(series.values == run8.at(tau).values);
    CHECK(series.values == run1b.at(tau).values);
  }
}

TEST_CASE("single-tau price equals the batched price (stream prefix)") {
  RoughModel model;
  model.hurst = 0.08;
  model.eta = 1.0;
  model.sigma0 = 0.2;
  model.horizon_days = 25;
  McConfig config;
  config.n_paths = 500;
  config.taus = {1, 6, 11};
  config.base_seed = 5;

  const FbmGrid grid = build_experiment_grid(model, config);
  const SpotVol spot = simulate_spot_vol(
      model, grid, derive_seed(config.base_seed, {stream::kMasterPath}));

  const auto batched = atm_prices_at(spot.path, 10, config.taus, model, config);
  for (std::size_t i = 0; i < config.taus.size(); ++i)
    CHECK(batched[i] == doctest::Approx(atm_price_at(spot.path, 10,
                                                     config.taus[i], model,
                                                     config))
                            .epsilon(1e-15));
}

TEST_CASE("price is a conditional average: day/tau bounds enforced") {
  RoughModel model;
  model.horizon_days = 10;
  McConfig config;
  config.n_paths = 100;
  config.taus = {3};
  const FbmGrid grid = build_experiment_grid(model, config);
  const SpotVol spot = simulate_spot_vol(model, grid, 3);
  CHECK_THROWS_AS(static_cast<void>(atm_price_at(spot.path, 12, 3, model, config)),
                  std::out_of_range);
  CHECK_THROWS_AS(static_cast<void>(atm_price_at(spot.path, 0, 3, model, config)),
                  std::out_of_range);
}

TEST_CASE("doubling M shrinks the price standard error by ~sqrt(2)") {
  RoughModel model;
  model.hurst = 0.08;
  model.eta = 1.0;
  model.sigma0 = 0.2;
  model.horizon_days = 12;
  McConfig small;
  small.n_paths = 400;
  small.taus = {5};
  small.base_seed = 20000;
  McConfig big = small;
  big.n_paths = 800;

  const FbmGrid grid = build_experiment_grid(model, small);
  const SpotVol spot = simulate_spot_vol(
      model, grid, derive_seed(small.base_seed, {stream::kMasterPath}));

  // Measured over repeated seed blocks: the sd of the M-path price estimate
  // must shrink by ~sqrt(2) when M doubles.
  const int reps = 200;
  std::vector<double> p_small(reps), p_big(reps);
  for (int r = 0; r < reps; ++r) {
    McConfig cs = small, cb = big;
    cs.base_seed = 20000 + 7 * r;
    cb.base_seed = 20000 + 7 * r;
    p_small[r] = atm_price_at(spot.path, 6, 5, model, cs);
    p_big[r] = atm_price_at(spot.path, 6, 5, model, cb);
  }
  const double sd_small = std::sqrt(sample_variance(p_small));
  const double sd_big = std::sqrt(sample_variance(p_big));
  CHECK(sd_big > 0.0);
  const double measured = sd_small / sd_big;
  CHECK(measured > 1.1);
  CHECK(measured < 1.8);

  // and the in-run standard error estimate agrees with the same scaling
  std::vector<double> se_s, se_b;
  atm_prices_at(spot.path, 6, {5}, model, small, &se_s);
  atm_prices_at(spot.path, 6, {5}, model, big, &se_b);
  CHECK(se_s[0] > 0.0);
  const double ratio = se_s[0] / se_b[0];
  CHECK(ratio > 1.2);
  CHECK(ratio < 1.7);
}

TEST_CASE("tau = 1 price is exactly Black-Scholes at today's spot vol") {
  RoughModel model;
  model.hurst = 0.1;
  model.eta = 0.8;
  model.sigma0 = 0.2;
  model.horizon_days = 30;
  McConfig config;
  config.n_paths = 500;
  config.taus = {1};
  config.base_seed = 19;

  const FbmGrid grid = build_experiment_grid(model, config);
  const SpotVol spot = simulate_spot_vol(
      model, grid, derive_seed(config.base_seed, {stream::kMasterPath}));
  for (int day : {1, 10, 25}) {
    const double sigma_today = spot.series.values[day - 1];
    CHECK(atm_price_at(spot.path, day, 1, model, config) ==
          doctest::Approx(bs_call_price({1.0, 1.0, 1.0 / kTradingDaysPerYear,
                                         sigma_today, 1.0}))
              .epsilon(1e-15));
  }
}

TEST_CASE("tau = 2 implied vol matches the one-step conditional oracle") {
  // With the variance anchored at today's vol, the two-day option averages
  // over exactly one fresh Gaussian innovation: the conditional price is a
  // 1-D integral over the next day's conditional law.
  RoughModel model;
  model.hurst = 0.1;
  model.eta = 0.8;
  model.sigma0 = 0.2;
  model.horizon_days = 60;
  McConfig config;
  config.n_paths = 20000;
  config.taus = {2};
  config.base_seed = 77;

  const FbmGrid grid = build_experiment_grid(model, config);
  const SpotVol spot = simulate_spot_vol(
      model, grid, derive_seed(config.base_seed, {stream::kMasterPath}));
  const double tau_years = 2.0 / kTradingDaysPerYear;

  for (int day : {1, 7, 13, 19, 25, 31, 37, 43, 49, 55}) {
    const FbmConditioner cond(spot.path, day, day + 1);
    const double mu = cond.conditional_mean(day);
    const double sd = std::sqrt(cond.conditional_var(day));
    const double sigma_today = spot.series.values[day - 1];

    const double oracle_price =
        integrate_adaptive(
            [&](double z) {
              const double sigma_next =
                  model.sigma0 * std::exp(model.eta * (mu + sd * z));
              const double rms =
                  std::sqrt(0.5 * (sigma_today * sigma_today +
                                   sigma_next * sigma_next));
              const double phi = std::exp(-0.5 * z * z) /
                                 std::sqrt(2.0 * 3.14159265358979323846);
              return phi * bs_call_price({1.0, 1.0, tau_years, rms, 1.0});
            },
            -10.0, 10.0, 1e-12)
            .value;
    const double oracle_iv =
        bs_implied_vol(oracle_price, 1.0, 1.0, tau_years, 1.0);

    std::vector<double> se;
    const double mc_price =
        atm_prices_at(spot.path, day, {2}, model, config, &se)[0];
    const double mc_iv = bs_implied_vol(mc_price, 1.0, 1.0, tau_years, 1.0);

    // convert the price se into an implied-vol se through the vega
    const double v = oracle_iv * std::sqrt(tau_years);
    const double vega = norm_pdf(0.5 * v) * std::sqrt(tau_years);
    CHECK(std::fabs(mc_iv - oracle_iv) <= 3.0 * se[0] / vega + 1e-12);
  }
}

TEST_CASE("hurst_vs_tau produces aligned series and estimates") {
  RoughModel model;
  model.hurst = 0.04;
  model.eta = 1.0;
  model.sigma0 = 0.2;
  model.horizon_days = 120;
  McConfig config;
  config.n_paths = 150;
  config.taus = {1, 5};
  config.base_seed = 31;
  EstimatorConfig est;
  est.delta_max = 20;

  const ExperimentResult res = hurst_vs_tau(model, config, est, 2);
  CHECK(res.spot_series.size() == 120);
  for (const auto& [tau, series] : res.implied_series)
    CHECK(series.size() == 120);
  CHECK(res.hurst_by_tau.size() == 2);
  CHECK(res.hurst_by_tau.count(1) == 1);
  CHECK(res.hurst_by_tau.count(5) == 1);
  // smoothing: implied series is less rough than spot
  CHECK(res.hurst_by_tau.at(5).value > res.spot_hurst.value);
}

TEST_CASE("config validation") {
  McConfig config;
  config.n_paths = 50;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.n_paths = 100;
  config.taus = {};
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.taus = {0};
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);

  RoughModel model;
  model.hurst = 1.5;
  CHECK_THROWS_AS(model.validate(), std::invalid_argument);
}
