#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "rvol/fbm.hpp"
#include "rvol/rng.hpp"
#include "rvol/roughness.hpp"
#include "rvol/stats.hpp"

using namespace rvol;

namespace {

// Grids are expensive at n = 10^4; share them across the test cases that
// need exact fBm input of that length.
const FbmGrid& shared_grid(double hurst, int n) {
  static std::map<std::pair<double, int>, FbmGrid> cache;
  auto it = cache.find({hurst, n});
  if (it == cache.end()) {
    FbmGridOptions opts;
    opts.max_n = std::max(4096, n);
    it = cache.emplace(std::make_pair(hurst, n),
                       FbmGrid::build(hurst, n, 1.0, opts))
             .first;
  }
  return it->second;
}

// exp of an exact fBm path: log-increments are exactly fBm increments.
VolSeries fbm_exp_series(double hurst, int n, std::uint64_t seed) {
  const FbmPath path = sample_path(shared_grid(hurst, n), seed);
  std::vector<double> v(path.values.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(path.values[i]);
  return VolSeries::from_values(std::move(v));
}

double brute_force_m(const VolSeries& s, double q, int delta) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k + delta < s.values.size(); ++k) {
    sum += std::pow(
        std::fabs(std::log(s.values[k + delta]) - std::log(s.values[k])), q);
    ++count;
  }
  return sum / static_cast<double>(count);
}

}  // namespace

TEST_CASE("structure function basics") {
  // constant series -> m = 0
  const VolSeries c = VolSeries::from_values(std::vector<double>(50, 0.2));
  CHECK(structure_function(c, 2.0, 3) == 0.0);

  // sigma_k = exp(k): every lag-delta log increment equals delta
  std::vector<double> ev;
  for (int k = 0; k < 40; ++k) ev.push_back(std::exp(static_cast<double>(k)));
  const VolSeries e = VolSeries::from_values(std::move(ev));
  for (int delta : {1, 2, 5})
    for (double q : {0.5, 1.0, 2.0})
      CHECK(structure_function(e, q, delta) ==
            doctest::Approx(std::pow(delta, q)).epsilon(1e-12));

  CHECK_THROWS_AS(static_cast<void>(structure_function(e, 2.0, 39)),
                  std::invalid_argument);
  CHECK_THROWS_AS(static_cast<void>(structure_function(e, 2.0, 0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(static_cast<void>(structure_function(e, -1.0, 2)),
                  std::invalid_argument);
}

TEST_CASE("structure function equals the brute-force double loop") {
  const VolSeries s = fbm_exp_series(0.3, 200, 99);
  for (int delta : {1, 3, 17, 60})
    for (double q : {0.5, 1.0, 2.0, 3.0})
      CHECK(structure_function(s, q, delta) ==
            doctest::Approx(brute_force_m(s, q, delta)).epsilon(1e-14));
}

TEST_CASE("scale invariance: multiplying the series changes nothing") {
  const VolSeries s = fbm_exp_series(0.3, 300, 7);
  VolSeries scaled = s;
  for (double& v : scaled.values) v *= 123.456;
  for (int delta : {1, 5, 20})
    CHECK(structure_function(s, 2.0, delta) ==
          doctest::Approx(structure_function(scaled, 2.0, delta))
              .epsilon(1e-12));

  const ScalingReport a = fit_scaling(s, EstimatorConfig{});
  const ScalingReport b = fit_scaling(scaled, EstimatorConfig{});
  CHECK(a.hurst_hat == doctest::Approx(b.hurst_hat).epsilon(1e-12));
}

TEST_CASE("date relabeling does not affect the fit") {
  const VolSeries s = fbm_exp_series(0.3, 300, 8);
  VolSeries relabeled = s;
  for (std::size_t i = 0; i < relabeled.dates.size(); ++i)
    relabeled.dates[i] = "label_" + std::to_string(1000 + i);
  CHECK(fit_scaling(s, EstimatorConfig{}).hurst_hat ==
        doctest::Approx(fit_scaling(relabeled, EstimatorConfig{}).hurst_hat));
}

TEST_CASE("degenerate linear log-series: zeta(q) = q, hurst = 1") {
  std::vector<double> ev;
  for (int k = 0; k < 60; ++k) ev.push_back(std::exp(static_cast<double>(k)));
  const VolSeries e = VolSeries::from_values(std::move(ev));
  EstimatorConfig cfg;
  cfg.delta_max = 20;
  const ScalingReport r = fit_scaling(e, cfg);
  for (const auto& z : r.zeta) CHECK(z.zeta == doctest::Approx(z.q).epsilon(1e-10));
  CHECK(r.hurst_hat == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.warnings.empty());
}

TEST_CASE("fit_scaling input validation") {
  const VolSeries s = fbm_exp_series(0.3, 100, 3);
  CHECK_THROWS_AS(static_cast<void>(fit_scaling(s, {0.5}, {1, 2, 3})),
                  std::invalid_argument);
  CHECK_THROWS_AS(static_cast<void>(fit_scaling(s, {0.5, 1.0}, {1, 2})),
                  std::invalid_argument);

  // constant series: every cell is zero, dropped, then per-q error
  const VolSeries c = VolSeries::from_values(std::vector<double>(100, 1.0));
  CHECK_THROWS_WITH_AS(
      static_cast<void>(fit_scaling(c, EstimatorConfig{})),
      doctest::Contains("fewer than 3 usable"), std::invalid_argument);
}

TEST_CASE("m(2,delta) tracks delta^2H on exact fBm input") {
  const double h = 0.3;
  const VolSeries s = fbm_exp_series(h, 10000, 12345);
  double lo = 1e300, hi = -1e300;
  for (int delta = 1; delta <= 40; ++delta) {
    const double ratio =
        structure_function(s, 2.0, delta) / std::pow(delta, 2.0 * h);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  // constant across delta within 10% relative spread
  CHECK((hi - lo) / (0.5 * (hi + lo)) < 0.10);
}

TEST_CASE("monofractality residual below 0.05 on exact fBm") {
  const VolSeries s = fbm_exp_series(0.3, 10000, 777);
  const ScalingReport r = fit_scaling(s, EstimatorConfig{});
  for (const auto& z : r.zeta)
    CHECK(std::fabs(z.zeta - z.q * r.hurst_hat) < 0.05);
}

TEST_CASE("estimator recovers H on exact fBm, a few seeds") {
  for (double h : {0.1, 0.3}) {
    double sum = 0.0;
    const int seeds = 8;
    for (int s = 0; s < seeds; ++s)
      sum += fit_scaling(fbm_exp_series(h, 4000, 50 + s), EstimatorConfig{})
                 .hurst_hat;
    CHECK(std::fabs(sum / seeds - h) < 0.04);
  }
}

TEST_CASE("increment diagnostics on Gaussian input") {
  const double h = 0.3;
  const VolSeries s = fbm_exp_series(h, 10000, 2020);

  const IncrementDiagnostics d1 = increment_diagnostics(s, 1);
  CHECK(d1.n_increments == s.size() - 1);
  CHECK(std::fabs(d1.excess_kurtosis) < 0.2);
  CHECK(std::fabs(d1.skewness) < 0.15);
  CHECK(!d1.bins.empty());
  std::size_t total = 0;
  for (const auto& b : d1.bins) total += b.count;
  CHECK(total == d1.n_increments);

  // doubling delta multiplies the increment stdev by 2^H
  const IncrementDiagnostics d2 = increment_diagnostics(s, 2);
  const double ratio = d2.stdev / d1.stdev;
  CHECK(std::fabs(ratio - std::pow(2.0, h)) < 0.05);

  // fBm overlay parameters are close to the generating ones
  CHECK(std::fabs(d1.fbm_hurst - h) < 0.05);
  CHECK(std::fabs(d1.fbm_nu - 1.0) < 0.1);

  // density curves integrate to ~1
  double mass = 0.0;
  for (std::size_t i = 1; i < d1.gauss_curve.size(); ++i)
    mass += 0.5 * (d1.gauss_curve[i].second + d1.gauss_curve[i - 1].second) *
            (d1.gauss_curve[i].first - d1.gauss_curve[i - 1].first);
  CHECK(mass == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("increment diagnostics error paths") {
  const VolSeries tiny = fbm_exp_series(0.3, 20, 4);
  CHECK_THROWS_WITH_AS(static_cast<void>(increment_diagnostics(tiny, 1)),
                       doctest::Contains("fewer than 30"),
                       std::invalid_argument);

  const VolSeries c = VolSeries::from_values(std::vector<double>(100, 1.0));
  CHECK_THROWS_AS(static_cast<void>(increment_diagnostics(c, 1)),
                  std::invalid_argument);
}
