#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <vector>

#include "rvol/black_scholes.hpp"
#include "rvol/csv.hpp"
#include "rvol/dates.hpp"
#include "rvol/market.hpp"
#include "rvol/rng.hpp"

using namespace rvol;

namespace {

OptionQuoteRow make_row(const std::string& date, const std::string& expiry,
                        double strike, double call_mid, double put_mid,
                        double half_spread = 0.0, long vol_c = 100,
                        long vol_p = 100) {
  OptionQuoteRow r;
  r.date = date;
  r.expiry = expiry;
  r.strike = strike;
  r.call_bid = call_mid - half_spread;
  r.call_ask = call_mid + half_spread;
  r.put_bid = put_mid - half_spread;
  r.put_ask = put_mid + half_spread;
  r.call_volume = vol_c;
  r.put_volume = vol_p;
  return r;
}

// Exact put-call-parity synthetic quotes: C - P = D (F - K).
std::vector<OptionQuoteRow> parity_rows(const std::string& date,
                                        const std::string& expiry, double d,
                                        double f, int n_strikes,
                                        double half_spread = 0.0) {
  std::vector<OptionQuoteRow> rows;
  for (int i = 0; i < n_strikes; ++i) {
    const double k = f * (0.9 + 0.2 * i / std::max(1, n_strikes - 1));
    const double call = bs_call_price({f, k, 30.0 / 365.0, 0.2, 1.0}) * d;
    const double put = call - d * (f - k);
    rows.push_back(make_row(date, expiry, k, call, put, half_spread));
  }
  return rows;
}

// Independent oracle: raw weighted normal equations accumulated and solved
// in long double (Cramer), a different algebraic route from the centered
// implementation.
std::pair<double, double> normal_equations_oracle(
    const std::vector<OptionQuoteRow>& rows, const MarketConfig& cfg) {
  long double sw = 0, swk = 0, swkk = 0, swm = 0, swkm = 0;
  for (const auto& r : rows) {
    const long double spread = 0.5L * (r.call_ask - r.call_bid) +
                               0.5L * (r.put_ask - r.put_bid);
    const long double w =
        std::sqrt(static_cast<long double>(std::min(r.call_volume, r.put_volume))) /
        std::max(spread, static_cast<long double>(cfg.weight_spread_floor));
    const long double k = r.strike;
    const long double m = 0.5L * (r.call_bid + r.call_ask) -
                          0.5L * (r.put_bid + r.put_ask);
    sw += w;
    swk += w * k;
    swkk += w * k * k;
    swm += w * m;
    swkm += w * k * m;
  }
  // model m = a - b k: minimize sum w (m - a + b k)^2
  // [ sw   -swk  ] [a]   [ swm  ]
  // [ -swk  swkk ] [b] = [ -swkm]
  const long double det = sw * swkk - swk * swk;
  const long double a = (swm * swkk - swk * swkm) / det;
  const long double b = -(sw * swkm - swk * swm) / det;
  return {static_cast<double>(b), static_cast<double>(a / b)};  // (D, F)
}

}  // namespace

TEST_CASE("quote filters follow the documented rules") {
  MarketConfig cfg;
  std::vector<OptionQuoteRow> rows;
  // retained: 16 calendar days out, prices above threshold, volumes positive
  rows.push_back(make_row("2010-06-01", "2010-06-17", 1000, 12.0, 11.0));
  // removed: call mid below 2.5 cents
  rows.push_back(make_row("2010-06-01", "2010-06-17", 1200, 0.02, 30.0));
  // removed: zero call volume
  rows.push_back(
      make_row("2010-06-01", "2010-06-17", 1010, 12.0, 11.0, 0.0, 0, 50));
  // removed: maturity outside [15, 60] (7 days)
  rows.push_back(make_row("2010-06-01", "2010-06-08", 1000, 12.0, 11.0));
  // removed: maturity too long (90 days)
  rows.push_back(make_row("2010-06-01", "2010-08-30", 1000, 12.0, 11.0));
  // removed: observation date on the third Friday (2010-06-18)
  rows.push_back(make_row("2010-06-18", "2010-07-16", 1000, 12.0, 11.0));
  // removed: business day before the third Friday
  rows.push_back(make_row("2010-06-17", "2010-07-16", 1000, 12.0, 11.0));

  const FilterResult res = filter_quotes(rows, cfg);
  CHECK(res.rows.size() == 1);
  CHECK(res.report.input_rows == 7);
  CHECK(res.report.removed_low_price == 1);
  CHECK(res.report.removed_zero_volume == 1);
  CHECK(res.report.removed_bad_maturity == 2);
  CHECK(res.report.removed_settlement == 2);
  CHECK(res.report.retained == 1);
}

TEST_CASE("exact parity data recovers discount and forward to 1e-10") {
  MarketConfig cfg;
  const auto rows = parity_rows("2010-06-01", "2010-07-01", 0.99, 1500.0, 12);
  const ParityFit fit = fit_parity(rows, cfg);
  CHECK(std::fabs(fit.discount - 0.99) < 1e-10);
  CHECK(std::fabs(fit.forward - 1500.0) < 1e-10 * 1500.0);
  CHECK(fit.n_strikes_used == 12);
  CHECK(fit.residual_rms < 1e-10);
}

TEST_CASE("noisy parity data matches the weighted normal-equations oracle") {
  MarketConfig cfg;
  auto rows = parity_rows("2010-06-01", "2010-07-01", 0.99, 1500.0, 20, 0.05);
  // symmetric +-0.01 perturbation of the call mids
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double eps = (i % 2 == 0) ? 0.01 : -0.01;
    rows[i].call_bid += eps;
    rows[i].call_ask += eps;
  }
  const ParityFit fit = fit_parity(rows, cfg);
  CHECK(std::fabs(fit.discount - 0.99) < 1e-3);
  CHECK(std::fabs(fit.forward - 1500.0) < 0.5);

  const auto [d_oracle, f_oracle] = normal_equations_oracle(rows, cfg);
  CHECK(std::fabs(fit.discount - d_oracle) < 1e-12 * std::fabs(d_oracle));
  CHECK(std::fabs(fit.forward - f_oracle) < 1e-12 * std::fabs(f_oracle));
}

TEST_CASE("parity fit equals a brute-force 2-D grid refinement") {
  MarketConfig cfg;
  auto rows = parity_rows("2010-06-01", "2010-07-01", 0.97, 1234.0, 9, 0.02);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double eps = (i % 2 == 0) ? 0.004 : -0.004;
    rows[i].put_bid += eps;
    rows[i].put_ask += eps;
  }
  const ParityFit fit = fit_parity(rows, cfg);

  auto objective = [&](double d, double f) {
    double s = 0.0;
    for (const auto& r : rows) {
      const double spread = 0.5 * (r.call_ask - r.call_bid) +
                            0.5 * (r.put_ask - r.put_bid);
      const double w =
          std::sqrt(static_cast<double>(std::min(r.call_volume, r.put_volume))) /
          std::max(spread, cfg.weight_spread_floor);
      const double res = (r.call_mid() - r.put_mid()) - d * (f - r.strike);
      s += w * res * res;
    }
    return s;
  };

  double d_lo = 0.5, d_hi = 1.4, f_lo = 900.0, f_hi = 1600.0;
  double best_d = 0.0, best_f = 0.0;
  for (int level = 0; level < 30; ++level) {
    double best = 1e300;
    const int grid = 24;
    for (int i = 0; i <= grid; ++i) {
      for (int j = 0; j <= grid; ++j) {
        const double d = d_lo + (d_hi - d_lo) * i / grid;
        const double f = f_lo + (f_hi - f_lo) * j / grid;
        const double val = objective(d, f);
        if (val < best) {
          best = val;
          best_d = d;
          best_f = f;
        }
      }
    }
    const double d_step = (d_hi - d_lo) / grid;
    const double f_step = (f_hi - f_lo) / grid;
    d_lo = best_d - 2.0 * d_step;
    d_hi = best_d + 2.0 * d_step;
    f_lo = best_f - 2.0 * f_step;
    f_hi = best_f + 2.0 * f_step;
  }
  CHECK(std::fabs(fit.discount - best_d) < 1e-7);
  CHECK(std::fabs(fit.forward - best_f) < 1e-4);
}

TEST_CASE("parity error paths") {
  MarketConfig cfg;
  std::vector<OptionQuoteRow> one{
      make_row("2010-06-01", "2010-07-01", 1500, 30.0, 29.0)};
  CHECK_THROWS_WITH_AS(static_cast<void>(fit_parity(one, cfg)),
                       doctest::Contains("distinct strikes"),
                       std::invalid_argument);

  // slope with the wrong sign: C - P increasing in K -> nonpositive discount
  std::vector<OptionQuoteRow> bad{
      make_row("2010-06-01", "2010-07-01", 1400, 10.0, 40.0),
      make_row("2010-06-01", "2010-07-01", 1500, 30.0, 29.0),
  };
  CHECK_THROWS_WITH_AS(static_cast<void>(fit_parity(bad, cfg)),
                       doctest::Contains("nonpositive discount"),
                       std::invalid_argument);
}

TEST_CASE("scaling strikes and prices scales F and leaves D unchanged") {
  MarketConfig cfg;
  auto rows = parity_rows("2010-06-01", "2010-07-01", 0.98, 1500.0, 10, 0.03);
  const ParityFit base = fit_parity(rows, cfg);
  const double c = 3.7;
  for (auto& r : rows) {
    r.strike *= c;
    r.call_bid *= c;
    r.call_ask *= c;
    r.put_bid *= c;
    r.put_ask *= c;
  }
  const ParityFit scaled = fit_parity(rows, cfg);
  CHECK(scaled.discount == doctest::Approx(base.discount).epsilon(1e-9));
  CHECK(scaled.forward == doctest::Approx(base.forward * c).epsilon(1e-9));
}

TEST_CASE("flat-vol quotes invert to the generating vol inside the band") {
  MarketConfig cfg;
  const double d = 0.995, f = 1450.0, vol = 0.2;
  const std::string date = "2010-06-01", expiry = "2010-07-01";
  std::vector<OptionQuoteRow> rows;
  for (double k :
       {1380.0, 1400.0, 1420.0, 1440.0, 1450.0, 1460.0, 1480.0, 1500.0, 1520.0}) {
    const double tau_years = 30.0 / 365.0;
    const double call = bs_call_price({f, k, tau_years, vol, 1.0}) * d;
    const double put = call - d * (f - k);
    rows.push_back(make_row(date, expiry, k, call, put));
  }
  const ParityFit fit = fit_parity(rows, cfg);
  const auto points = extract_atm_ivs(rows, fit, cfg);
  // |log(K/F)| <= 0.03 keeps strikes in ~[1407, 1494]
  CHECK(points.size() == 5);
  for (const auto& p : points) {
    CHECK(std::fabs(p.log_moneyness) <= 0.03);
    CHECK(std::fabs(p.implied_vol - vol) < 1e-8);
  }
}

TEST_CASE("moneyness band excludes far strikes") {
  MarketConfig cfg;
  ParityFit fit;
  fit.date = "2010-06-01";
  fit.expiry = "2010-07-01";
  fit.discount = 1.0;
  fit.forward = 1000.0;
  std::vector<OptionQuoteRow> rows{
      make_row("2010-06-01", "2010-07-01", 1051.3, 5.0, 55.0),  // logm ~ 0.05
  };
  CHECK(extract_atm_ivs(rows, fit, cfg).empty());
}

TEST_CASE("daily proxy selection: shortest maturity, nearest ATM, low tie") {
  std::vector<IvPoint> points;
  IvPoint p;
  p.date = "2010-06-01";
  p.expiry = "2010-07-16";
  p.tau_days = 45;
  p.strike = 1000;
  p.log_moneyness = 0.001;
  p.implied_vol = 0.30;
  points.push_back(p);
  p.expiry = "2010-06-25";
  p.tau_days = 24;
  p.strike = 1010;
  p.log_moneyness = 0.012;
  p.implied_vol = 0.21;
  points.push_back(p);
  p.tau_days = 24;
  p.strike = 995;
  p.log_moneyness = -0.003;
  p.implied_vol = 0.22;
  points.push_back(p);
  // tie in |logm| broken toward the lower strike
  p.tau_days = 24;
  p.strike = 1001;
  p.log_moneyness = 0.003;
  p.implied_vol = 0.23;
  points.push_back(p);

  const auto proxies = select_daily_proxies(points);
  REQUIRE(proxies.size() == 1);
  CHECK(proxies[0].tau_days == 24);
  CHECK(proxies[0].sigma_hat == doctest::Approx(0.22));
}

TEST_CASE("pipeline runs end to end on synthetic flat-vol quotes") {
  MarketConfig cfg;
  std::vector<OptionQuoteRow> rows;
  // 10 quote dates in June 2010 avoiding the settlement window (18th +- 1bd)
  const std::vector<std::string> dates{
      "2010-06-01", "2010-06-02", "2010-06-03", "2010-06-04", "2010-06-07",
      "2010-06-08", "2010-06-09", "2010-06-10", "2010-06-11", "2010-06-14"};
  const std::string expiry = "2010-07-09";  // 25..38 calendar days out
  for (const auto& date : dates) {
    const double tau_years =
        static_cast<double>(days_from_civil(parse_iso_date(expiry)) -
                            days_from_civil(parse_iso_date(date))) /
        365.0;
    for (double k : {1420.0, 1450.0, 1480.0}) {
      const double call = bs_call_price({1450.0, k, tau_years, 0.2, 1.0}) * 0.99;
      const double put = call - 0.99 * (1450.0 - k);
      rows.push_back(make_row(date, expiry, k, call, put));
    }
  }
  const MarketResult res = run_market_pipeline(rows, cfg);
  CHECK(res.errors.empty());
  CHECK(res.parity_fits.size() == dates.size());
  CHECK(res.daily_proxies.size() == dates.size());
  REQUIRE(res.proxy_series_raw.has_value());
  for (double v : res.proxy_series_raw->values)
    CHECK(std::fabs(v - 0.2) < 1e-6);
  for (const auto& fit : res.parity_fits) {
    CHECK(fit.discount == doctest::Approx(0.99).epsilon(1e-8));
    CHECK(fit.forward == doctest::Approx(1450.0).epsilon(1e-8));
  }
}

TEST_CASE("MAD outlier pass drops per-date outliers when enabled") {
  MarketConfig cfg;
  cfg.mad_filter = true;
  cfg.mad_threshold = 5.0;

  std::vector<OptionQuoteRow> rows;
  const double tau_years = 30.0 / 365.0;
  // a gentle smile so the per-date MAD is a meaningful scale
  const std::vector<std::pair<double, double>> chain{{1430.0, 0.21},
                                                     {1440.0, 0.205},
                                                     {1450.0, 0.2},
                                                     {1460.0, 0.195},
                                                     {1470.0, 0.205}};
  for (const auto& [k, vol] : chain) {
    const double call = bs_call_price({1450.0, k, tau_years, vol, 1.0});
    const double put = call - (1450.0 - k);
    rows.push_back(make_row("2010-06-01", "2010-07-01", k, call, put));
  }
  // poison one strike with a wildly wrong call price (still arb-free)
  {
    const double k = 1452.0;
    const double call = bs_call_price({1450.0, k, tau_years, 0.8, 1.0});
    const double put = call - (1450.0 - k);
    rows.push_back(make_row("2010-06-01", "2010-07-01", k, call, put));
  }
  const MarketResult res = run_market_pipeline(rows, cfg);
  CHECK(res.filter_report.removed_mad_outlier == 1);
  REQUIRE(res.proxy_series_raw.has_value());
  CHECK(std::fabs(res.proxy_series_raw->values[0] - 0.2) < 0.05);
}

TEST_CASE("quotes csv schema enforcement") {
  const std::string path = "test_quotes_tmp.csv";
  {
    std::ofstream out(path);
    out << "date,expiry,strike,call_bid,call_ask,put_bid,put_ask,call_volume,"
           "put_volume\n";
    out << "2010-06-01,2010-07-01,1450,30.0,30.4,28.0,28.4,10,12\n";
    out << "2010-06-02,2010-07-01,1450,30.9,30.5,28.0,28.4,10,12\n";  // bid>ask
  }
  std::vector<std::string> errors;
  const auto rows = read_quotes_csv(path, &errors);
  CHECK(rows.size() == 1);
  CHECK(errors.size() == 1);

  {
    std::ofstream out(path);
    out << "date,expiry,strike,call_bid,call_ask\n2010-06-01,2010-07-01,1,2,3\n";
  }
  CHECK_THROWS_AS(static_cast<void>(read_quotes_csv(path, nullptr)), CsvError);
  std::remove(path.c_str());
}
