#include "rvol/market.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "rvol/black_scholes.hpp"
#include "rvol/csv.hpp"
#include "rvol/dates.hpp"
#include "rvol/stats.hpp"

namespace rvol {

namespace {

int tau_calendar_days(const OptionQuoteRow& row) {
  return static_cast<int>(days_from_civil(parse_iso_date(row.expiry)) -
                          days_from_civil(parse_iso_date(row.date)));
}

double parity_weight(const OptionQuoteRow& row, const MarketConfig& cfg) {
  const double spread =
      0.5 * (row.call_ask - row.call_bid) + 0.5 * (row.put_ask - row.put_bid);
  const long v = std::min(row.call_volume, row.put_volume);
  return std::sqrt(static_cast<double>(v)) /
         std::max(spread, cfg.weight_spread_floor);
}

}  // namespace

FilterResult filter_quotes(std::span<const OptionQuoteRow> rows,
                           const MarketConfig& cfg) {
  FilterResult out;
  out.report.input_rows = rows.size();
  for (const auto& row : rows) {
    const int tau = tau_calendar_days(row);
    if (tau < cfg.min_tau_days || tau > cfg.max_tau_days) {
      ++out.report.removed_bad_maturity;
      continue;
    }
    if (in_settlement_window(parse_iso_date(row.date), cfg.settlement_before_bd,
                             cfg.settlement_after_bd)) {
      ++out.report.removed_settlement;
      continue;
    }
    if (row.call_mid() < cfg.min_mid_price || row.put_mid() < cfg.min_mid_price) {
      ++out.report.removed_low_price;
      continue;
    }
    if (row.call_volume <= 0 || row.put_volume <= 0) {
      ++out.report.removed_zero_volume;
      continue;
    }
    out.rows.push_back(row);
  }
  out.report.retained = out.rows.size();
  return out;
}

ParityFit fit_parity(std::span<const OptionQuoteRow> rows,
                     const MarketConfig& cfg) {
  if (rows.empty()) throw std::invalid_argument("fit_parity: no rows");

  std::set<double> strikes;
  for (const auto& r : rows) strikes.insert(r.strike);
  if (strikes.size() < 2)
    throw std::invalid_argument(
        "fit_parity: need >= 2 distinct strikes for " + rows.front().date +
        " / " + rows.front().expiry + ", got " +
        std::to_string(strikes.size()));

  // Weighted least squares of mid = a - b K via the centered normal
  // equations: numerically stable for strike levels far from zero.
  double sw = 0.0, swk = 0.0, swm = 0.0;
  for (const auto& r : rows) {
    const double w = parity_weight(r, cfg);
    sw += w;
    swk += w * r.strike;
    swm += w * (r.call_mid() - r.put_mid());
  }
  if (!(sw > 0.0))
    throw std::invalid_argument("fit_parity: all weights vanish for " +
                                rows.front().date + " / " +
                                rows.front().expiry);
  const double kbar = swk / sw;
  const double mbar = swm / sw;
  double skk = 0.0, skm = 0.0;
  for (const auto& r : rows) {
    const double w = parity_weight(r, cfg);
    const double dk = r.strike - kbar;
    skk += w * dk * dk;
    skm += w * dk * ((r.call_mid() - r.put_mid()) - mbar);
  }
  if (!(skk > 0.0))
    throw std::invalid_argument("fit_parity: degenerate strike spread");

  const double slope = skm / skk;        // = -b = -D
  const double b = -slope;               // discount
  const double a = mbar - slope * kbar;  // = D F
  if (!(b > 0.0))
    throw std::invalid_argument(
        "fit_parity: nonpositive discount fitted for " + rows.front().date +
        " / " + rows.front().expiry + " (data pathology)");

  ParityFit fit;
  fit.date = rows.front().date;
  fit.expiry = rows.front().expiry;
  fit.discount = b;
  fit.forward = a / b;
  fit.n_strikes_used = static_cast<int>(strikes.size());

  double wss = 0.0;
  for (const auto& r : rows) {
    const double w = parity_weight(r, cfg);
    const double res =
        (r.call_mid() - r.put_mid()) - fit.discount * (fit.forward - r.strike);
    wss += w * res * res;
  }
  fit.residual_rms = std::sqrt(wss / sw);
  return fit;
}

std::vector<IvPoint> extract_atm_ivs(std::span<const OptionQuoteRow> rows,
                                     const ParityFit& parity,
                                     const MarketConfig& cfg,
                                     std::vector<std::string>* errors) {
  std::vector<IvPoint> points;
  for (const auto& r : rows) {
    const double logm = std::log(r.strike / parity.forward);
    if (std::fabs(logm) > cfg.moneyness_band) continue;
    const int tau_days = tau_calendar_days(r);
    const double tau_years = static_cast<double>(tau_days) / 365.0;
    try {
      IvPoint p;
      p.date = r.date;
      p.expiry = r.expiry;
      p.tau_days = tau_days;
      p.strike = r.strike;
      p.log_moneyness = logm;
      p.implied_vol = bs_implied_vol(r.call_mid(), parity.forward, r.strike,
                                     tau_years, parity.discount);
      points.push_back(p);
    } catch (const ImpliedVolError& e) {
      if (errors)
        errors->push_back("skipped strike " + format_double(r.strike) + " on " +
                          r.date + " / " + r.expiry + ": " + e.what());
    }
  }
  return points;
}

std::vector<DailyProxy> select_daily_proxies(std::span<const IvPoint> points) {
  // date -> best point, shortest maturity first, then nearest to ATM with
  // ties toward the lower strike.
  std::map<std::string, const IvPoint*> best;
  for (const auto& p : points) {
    auto [it, inserted] = best.try_emplace(p.date, &p);
    if (inserted) continue;
    const IvPoint* cur = it->second;
    bool better = false;
    if (p.tau_days != cur->tau_days) {
      better = p.tau_days < cur->tau_days;
    } else {
      const double da = std::fabs(p.log_moneyness);
      const double db = std::fabs(cur->log_moneyness);
      if (da != db)
        better = da < db;
      else
        better = p.strike < cur->strike;
    }
    if (better) it->second = &p;
  }

  std::vector<DailyProxy> out;
  out.reserve(best.size());
  for (const auto& [date, p] : best)
    out.push_back({date, p->tau_days, p->implied_vol});
  return out;
}

std::vector<OptionQuoteRow> read_quotes_csv(const std::string& path,
                                            std::vector<std::string>* errors) {
  CsvTable table = read_csv(path);
  require_header(table,
                 {"date", "expiry", "strike", "call_bid", "call_ask", "put_bid",
                  "put_ask", "call_volume", "put_volume"},
                 path);

  std::vector<OptionQuoteRow> rows;
  rows.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& f = table.rows[i];
    const std::size_t line = table.line_numbers[i];
    try {
      OptionQuoteRow r;
      r.date = f[0];
      r.expiry = f[1];
      parse_iso_date(r.date);
      parse_iso_date(r.expiry);
      r.strike = parse_double_field(f[2], line, "strike");
      r.call_bid = parse_double_field(f[3], line, "call_bid");
      r.call_ask = parse_double_field(f[4], line, "call_ask");
      r.put_bid = parse_double_field(f[5], line, "put_bid");
      r.put_ask = parse_double_field(f[6], line, "put_ask");
      r.call_volume = parse_long_field(f[7], line, "call_volume");
      r.put_volume = parse_long_field(f[8], line, "put_volume");
      if (!(r.strike > 0.0))
        throw CsvError("strike must be positive", line);
      if (r.call_bid > r.call_ask || r.put_bid > r.put_ask)
        throw CsvError("bid above ask", line);
      if (r.call_bid < 0.0 || r.put_bid < 0.0)
        throw CsvError("negative price", line);
      if (r.call_volume < 0 || r.put_volume < 0)
        throw CsvError("negative volume", line);
      rows.push_back(std::move(r));
    } catch (const std::exception& e) {
      if (errors)
        errors->push_back(std::string("quote row rejected: ") + e.what());
      else
        throw;
    }
  }
  return rows;
}

MarketResult run_market_pipeline(std::span<const OptionQuoteRow> rows,
                                 const MarketConfig& cfg) {
  MarketResult result;

  FilterResult filtered = filter_quotes(rows, cfg);
  result.filter_report = filtered.report;

  // Group by (date, expiry); map keys keep dates ordered for the outputs.
  std::map<std::pair<std::string, std::string>, std::vector<OptionQuoteRow>>
      groups;
  for (auto& row : filtered.rows)
    groups[{row.date, row.expiry}].push_back(std::move(row));

  for (const auto& [key, group] : groups) {
    try {
      const ParityFit fit = fit_parity(group, cfg);
      result.parity_fits.push_back(fit);
      auto points = extract_atm_ivs(group, fit, cfg, &result.errors);
      result.iv_panel.insert(result.iv_panel.end(), points.begin(),
                             points.end());
    } catch (const std::exception& e) {
      result.errors.push_back(std::string("group ") + key.first + " / " +
                              key.second + ": " + e.what());
    }
  }

  // Optional outlier pass: drop IVs more than mad_threshold raw MADs from
  // their date's median.
  if (cfg.mad_filter && !result.iv_panel.empty()) {
    std::map<std::string, std::vector<double>> by_date;
    for (const auto& p : result.iv_panel)
      by_date[p.date].push_back(p.implied_vol);
    std::map<std::string, std::pair<double, double>> med_mad;
    for (auto& [date, ivs] : by_date) {
      const double med = median_of(ivs);
      std::vector<double> dev;
      dev.reserve(ivs.size());
      for (double v : ivs) dev.push_back(std::fabs(v - med));
      med_mad[date] = {med, median_of(dev)};
    }
    std::vector<IvPoint> kept;
    kept.reserve(result.iv_panel.size());
    for (const auto& p : result.iv_panel) {
      const auto& [med, mad] = med_mad[p.date];
      if (mad > 0.0 &&
          std::fabs(p.implied_vol - med) > cfg.mad_threshold * mad) {
        ++result.filter_report.removed_mad_outlier;
        continue;
      }
      kept.push_back(p);
    }
    result.iv_panel = std::move(kept);
  }

  result.daily_proxies = select_daily_proxies(result.iv_panel);
  if (!result.daily_proxies.empty()) {
    std::vector<std::string> dates;
    std::vector<double> values;
    for (const auto& p : result.daily_proxies) {
      dates.push_back(p.date);
      values.push_back(p.sigma_hat);
    }
    result.proxy_series_raw =
        VolSeries::from_values(std::move(dates), std::move(values));
  }
  return result;
}

}  // namespace rvol
