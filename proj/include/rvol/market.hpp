#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rvol/medvedev.hpp"
#include "rvol/series.hpp"

namespace rvol {

// One strike's call/put quote pair on one (date, expiry). Dates ISO-8601.
struct OptionQuoteRow {
  std::string date;
  std::string expiry;
  double strike = 0.0;
  double call_bid = 0.0, call_ask = 0.0;
  double put_bid = 0.0, put_ask = 0.0;
  long call_volume = 0, put_volume = 0;

  double call_mid() const { return 0.5 * (call_bid + call_ask); }
  double put_mid() const { return 0.5 * (put_bid + put_ask); }
};

struct MarketConfig {
  double min_mid_price = 0.025;      // quotes below this are discarded
  int min_tau_days = 15;             // calendar-day maturity window
  int max_tau_days = 60;
  int settlement_before_bd = 1;      // window around the third Friday
  int settlement_after_bd = 1;
  double moneyness_band = 0.03;      // |log(K/F)| cutoff
  double weight_spread_floor = 1e-6; // parity weight denominator floor
  bool mad_filter = false;           // per-date IV outlier rule, off by default
  double mad_threshold = 10.0;
};

struct FilterReport {
  std::size_t input_rows = 0;
  std::size_t removed_bad_maturity = 0;   // outside [min_tau, max_tau] days
  std::size_t removed_settlement = 0;
  std::size_t removed_low_price = 0;
  std::size_t removed_zero_volume = 0;
  std::size_t removed_mad_outlier = 0;    // filled at the IV stage
  std::size_t retained = 0;
};

struct FilterResult {
  std::vector<OptionQuoteRow> rows;
  FilterReport report;
};

// Applies the quote filters in order: maturity window, settlement window
// around the third Friday, minimum mid price (either leg), zero volume
// (either leg; both legs feed the parity fit and the weights). Filtering is
// total: rows are counted per rule, never rejected with an error.
FilterResult filter_quotes(std::span<const OptionQuoteRow> rows,
                           const MarketConfig& cfg);

struct ParityFit {
  std::string date;
  std::string expiry;
  double discount = 0.0;  // D(tau)
  double forward = 0.0;   // F(tau)
  int n_strikes_used = 0;
  double residual_rms = 0.0;  // weighted RMS of the parity residuals
};

// Weighted least squares on the put-call parity residuals
//   mid_i - D (F - K_i),  mid_i = (C_a - P_b)/2 + (C_b - P_a)/2,
// with weights w_i = sqrt(min(VC, VP)) / ((C_a-C_b)/2 + (P_a-P_b)/2),
// the spread floored at cfg.weight_spread_floor. Solved in closed form for
// (a, b) = (D F, D); D = b, F = a/b. Requires >= 2 distinct strikes and a
// positive fitted discount.
ParityFit fit_parity(std::span<const OptionQuoteRow> rows,
                     const MarketConfig& cfg);

struct IvPoint {
  std::string date;
  std::string expiry;
  int tau_days = 0;
  double strike = 0.0;
  double log_moneyness = 0.0;
  double implied_vol = 0.0;
};

// Inverts the call mid prices of the strikes inside the moneyness band,
// using the parity-implied forward and discount; tau in years is
// calendar days / 365. Inversion failures are recorded and the strike
// skipped.
std::vector<IvPoint> extract_atm_ivs(std::span<const OptionQuoteRow> rows,
                                     const ParityFit& parity,
                                     const MarketConfig& cfg,
                                     std::vector<std::string>* errors = nullptr);

// Per date: the implied vol of the strike nearest to ATM on the shortest
// retained maturity (ties toward the lower strike).
std::vector<DailyProxy> select_daily_proxies(std::span<const IvPoint> points);

struct MarketResult {
  FilterReport filter_report;
  std::vector<ParityFit> parity_fits;
  std::vector<IvPoint> iv_panel;
  std::vector<DailyProxy> daily_proxies;
  std::optional<VolSeries> proxy_series_raw;  // absent when no date survives
  std::vector<std::string> errors;            // per-row/per-group failures
};

// Full pipeline: filter -> per-(date, expiry) parity fit -> IV extraction ->
// optional MAD outlier pass -> daily proxy selection. Per-group failures are
// collected, not fatal.
MarketResult run_market_pipeline(std::span<const OptionQuoteRow> rows,
                                 const MarketConfig& cfg);

// Quote CSV schema: date,expiry,strike,call_bid,call_ask,put_bid,put_ask,
// call_volume,put_volume. Rows violating bid <= ask (or unparsable) are
// reported through `errors` and skipped.
std::vector<OptionQuoteRow> read_quotes_csv(const std::string& path,
                                            std::vector<std::string>* errors);

}  // namespace rvol
