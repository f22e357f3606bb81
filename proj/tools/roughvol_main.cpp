// roughvol: batch front end for the rough-volatility toolkit.
//
// Subcommands:
//   estimate  structure-function scaling analysis of a date,value series
//   simulate  conditional-MC implied-vol experiment under rough volatility
//   market    option-quote pipeline: filter, parity fit, ATM IVs, proxies
//   bias      analytic maturity-smoothing bias curve f(theta)
//
// Every file a command writes lands in --out together with manifest.json;
// the manifest is the only artifact carrying a timestamp, so reruns with the
// same inputs and seed are byte-identical elsewhere.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "rvol/bias.hpp"
#include "rvol/black_scholes.hpp"
#include "rvol/config.hpp"
#include "rvol/csv.hpp"
#include "rvol/fbm.hpp"
#include "rvol/market.hpp"
#include "rvol/medvedev.hpp"
#include "rvol/quadrature.hpp"
#include "rvol/rough_mc.hpp"
#include "rvol/roughness.hpp"
#include "rvol/series.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kManifestName = "manifest.json";
constexpr const char* kManifestComment = "manifest: manifest.json";

struct ValidationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// manifest plumbing

struct Manifest {
  std::string command;
  std::uint64_t seed = 0;
  int workers = 0;
  ordered_json config;
  std::map<std::string, std::string> inputs;  // path -> digest
  std::vector<std::string> outputs;
  ordered_json results;

  void add_input(const std::string& path) {
    inputs[path] = rvol::file_digest(path);
  }
  void write(const fs::path& out_dir) {
    ordered_json j;
    j["command"] = command;
    j["toolkit_version"] = kVersion;
    j["created_utc"] = rvol::utc_timestamp();
    j["seed"] = seed;
    j["workers"] = workers;
    j["config"] = config;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    if (!results.is_null()) j["results"] = results;
    std::ofstream out(out_dir / kManifestName);
    out << j.dump(2) << "\n";
  }
};

fs::path prepare_out_dir(const std::string& out) {
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

// ---------------------------------------------------------------------------
// shared writers

void write_scaling_outputs(const rvol::ScalingReport& report,
                           const fs::path& out_dir, Manifest& manifest,
                           const ordered_json& diagnostics,
                           const std::string& report_name = "report.json") {
  {
    auto out = open_output(out_dir / "scaling_curves.csv");
    out << "# " << kManifestComment << "\n";
    out << "q,delta,log_delta,log_m\n";
    for (std::size_t iq = 0; iq < report.q_grid.size(); ++iq) {
      for (std::size_t id = 0; id < report.delta_grid.size(); ++id) {
        const double m = report.m_table[iq][id];
        out << rvol::format_double(report.q_grid[iq]) << ","
            << report.delta_grid[id] << ","
            << rvol::format_double(std::log(report.delta_grid[id])) << ","
            << (m > 0.0 ? rvol::format_double(std::log(m)) : "") << "\n";
      }
    }
    manifest.outputs.push_back("scaling_curves.csv");
  }
  {
    auto out = open_output(out_dir / "zeta_curve.csv");
    out << "# " << kManifestComment << "\n";
    out << "q,zeta,stderr,r_squared\n";
    for (const auto& z : report.zeta)
      out << rvol::format_double(z.q) << "," << rvol::format_double(z.zeta)
          << "," << rvol::format_double(z.stderr_) << ","
          << rvol::format_double(z.r_squared) << "\n";
    manifest.outputs.push_back("zeta_curve.csv");
  }
  {
    ordered_json j;
    j["manifest_file"] = kManifestName;
    j["q_grid"] = report.q_grid;
    j["delta_grid"] = report.delta_grid;
    j["m_table"] = report.m_table;
    ordered_json zetas = ordered_json::array();
    for (const auto& z : report.zeta) {
      ordered_json zj;
      zj["q"] = z.q;
      zj["zeta"] = z.zeta;
      zj["stderr"] = z.stderr_;
      zj["intercept"] = z.intercept;
      zj["r_squared"] = z.r_squared;
      zj["cells_used"] = z.cells_used;
      zetas.push_back(zj);
    }
    j["zeta"] = zetas;
    j["hurst"] = {{"value", report.hurst_hat}, {"stderr", report.hurst_stderr}};
    j["warnings"] = report.warnings;
    if (!diagnostics.is_null()) j["diagnostics"] = diagnostics;
    auto out = open_output(out_dir / report_name);
    out << j.dump(2) << "\n";
    manifest.outputs.push_back(report_name);
  }
}

ordered_json diagnostics_json(const rvol::IncrementDiagnostics& d) {
  ordered_json j;
  j["delta"] = d.delta;
  j["n_increments"] = d.n_increments;
  j["mean"] = d.mean;
  j["stdev"] = d.stdev;
  j["skewness"] = d.skewness;
  j["excess_kurtosis"] = d.excess_kurtosis;
  ordered_json bins = ordered_json::array();
  for (const auto& b : d.bins)
    bins.push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}});
  j["histogram"] = bins;
  j["gaussian_fit"] = {{"mean", d.gauss_mean}, {"stdev", d.gauss_stdev}};
  j["fbm_fit"] = {{"hurst", d.fbm_hurst},
                  {"nu", d.fbm_nu},
                  {"stdev", d.fbm_stdev}};
  auto curve = [](const std::vector<std::pair<double, double>>& c) {
    ordered_json arr = ordered_json::array();
    for (const auto& [x, y] : c) arr.push_back({x, y});
    return arr;
  };
  j["gaussian_curve"] = curve(d.gauss_curve);
  j["fbm_curve"] = curve(d.fbm_curve);
  return j;
}

// ---------------------------------------------------------------------------
// default configuration (also what --print-config shows)

const char* kDefaultConfig = R"([model]
hurst = 0.04
eta = 1.0
sigma0 = 0.2
horizon_days = 1000

[mc]
n_paths = 10000
taus = 1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20
base_seed = 42

[estimator]
q_grid = 0.5,1,1.5,2,3
delta_min = 1
delta_max = 40

[market]
min_mid_price = 0.025
min_tau_days = 15
max_tau_days = 60
settlement_before_bd = 1
settlement_after_bd = 1
moneyness_band = 0.03
weight_spread_floor = 1e-6
mad_filter = off
mad_threshold = 10

[medvedev]
# beta_rho = -0.18
# rho = -0.48
# phi = 0
# lambda0_ejump = 0
# e_jump = 0
# psi = 0

[bias]
theta_min = 0.01
theta_max = 100
theta_points = 200
delta_min = 1
delta_max = 40
)";

// ---------------------------------------------------------------------------
// estimate

struct EstimateArgs {
  std::string input;
  std::string out = ".";
  std::vector<double> q_grid{0.5, 1.0, 1.5, 2.0, 3.0};
  int delta_min = 1;
  int delta_max = 40;
  int diag_delta = 1;
  int bins = 0;
  bool skip_diagnostics = false;
};

int run_estimate(const EstimateArgs& args) {
  const rvol::VolSeries series = rvol::VolSeries::from_csv(args.input);

  rvol::EstimatorConfig cfg;
  cfg.q_grid = args.q_grid;
  cfg.delta_min = args.delta_min;
  cfg.delta_max = args.delta_max;
  const rvol::ScalingReport report = rvol::fit_scaling(series, cfg);

  ordered_json diag;
  if (!args.skip_diagnostics)
    diag = diagnostics_json(
        rvol::increment_diagnostics(series, args.diag_delta, args.bins));

  const fs::path out_dir = prepare_out_dir(args.out);
  Manifest manifest;
  manifest.command = "estimate";
  manifest.config = {{"input", args.input},
                     {"q_grid", args.q_grid},
                     {"delta_min", args.delta_min},
                     {"delta_max", args.delta_max},
                     {"diag_delta", args.diag_delta},
                     {"bins", args.bins}};
  manifest.add_input(args.input);
  write_scaling_outputs(report, out_dir, manifest, diag);
  manifest.results = {{"hurst", report.hurst_hat},
                      {"hurst_stderr", report.hurst_stderr},
                      {"n_observations", series.size()}};
  manifest.write(out_dir);

  std::cout << "estimate: n = " << series.size()
            << ", hurst = " << report.hurst_hat << " +- "
            << report.hurst_stderr << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  SimulateArgs() { mc.taus.clear(); }  // default filled below: 1..20

  std::string config_path;
  std::string out = ".";
  std::uint64_t seed = 42;
  int workers = 0;
  bool seed_given = false;
  std::vector<int> taus;  // subset override
  rvol::RoughModel model;
  rvol::McConfig mc;
  rvol::EstimatorConfig estimator;
};

void load_simulate_config(SimulateArgs& args) {
  if (args.config_path.empty()) return;
  rvol::KeyValueConfig cfg = rvol::KeyValueConfig::from_file(args.config_path);
  args.model.hurst = cfg.get_double("model", "hurst", args.model.hurst);
  args.model.eta = cfg.get_double("model", "eta", args.model.eta);
  args.model.sigma0 = cfg.get_double("model", "sigma0", args.model.sigma0);
  args.model.horizon_days = static_cast<int>(
      cfg.get_long("model", "horizon_days", args.model.horizon_days));
  args.mc.n_paths =
      static_cast<int>(cfg.get_long("mc", "n_paths", args.mc.n_paths));
  args.mc.taus = cfg.get_int_list("mc", "taus", args.mc.taus);
  args.mc.base_seed = static_cast<std::uint64_t>(
      cfg.get_long("mc", "base_seed", static_cast<long>(args.mc.base_seed)));
  args.estimator.q_grid =
      cfg.get_double_list("estimator", "q_grid", args.estimator.q_grid);
  args.estimator.delta_min = static_cast<int>(
      cfg.get_long("estimator", "delta_min", args.estimator.delta_min));
  args.estimator.delta_max = static_cast<int>(
      cfg.get_long("estimator", "delta_max", args.estimator.delta_max));
  cfg.check();
}

int run_simulate(SimulateArgs& args) {
  if (args.mc.taus.empty()) {
    args.mc.taus.resize(20);
    for (int t = 1; t <= 20; ++t) args.mc.taus[t - 1] = t;
  }
  load_simulate_config(args);
  if (!args.taus.empty()) args.mc.taus = args.taus;  // --taus subset
  if (args.seed_given) args.mc.base_seed = args.seed;

  std::vector<std::string> problems;
  try {
    args.model.validate();
  } catch (const std::exception& e) {
    problems.push_back(e.what());
  }
  try {
    args.mc.validate();
  } catch (const std::exception& e) {
    problems.push_back(e.what());
  }
  if (args.estimator.delta_max >= args.model.horizon_days)
    problems.push_back("estimator delta_max must be below horizon_days");
  if (!problems.empty()) throw rvol::ConfigError(std::move(problems));

  const rvol::ExperimentResult result =
      rvol::hurst_vs_tau(args.model, args.mc, args.estimator, args.workers);

  const fs::path out_dir = prepare_out_dir(args.out);
  Manifest manifest;
  manifest.command = "simulate";
  manifest.seed = args.mc.base_seed;
  manifest.workers = args.workers;
  manifest.config = {
      {"model",
       {{"hurst", args.model.hurst},
        {"eta", args.model.eta},
        {"sigma0", args.model.sigma0},
        {"horizon_days", args.model.horizon_days}}},
      {"mc",
       {{"n_paths", args.mc.n_paths},
        {"taus", args.mc.taus},
        {"base_seed", args.mc.base_seed}}},
      {"estimator",
       {{"q_grid", args.estimator.q_grid},
        {"delta_min", args.estimator.delta_min},
        {"delta_max", args.estimator.delta_max}}}};
  if (!args.config_path.empty()) manifest.add_input(args.config_path);

  result.spot_series.write_csv((out_dir / "spot_series.csv").string(),
                               kManifestComment);
  manifest.outputs.push_back("spot_series.csv");
  for (const auto& [tau, series] : result.implied_series) {
    const std::string name = "implied_tau_" + std::to_string(tau) + ".csv";
    series.write_csv((out_dir / name).string(), kManifestComment);
    manifest.outputs.push_back(name);
  }
  {
    auto out = open_output(out_dir / "bias_curve.csv");
    out << "# " << kManifestComment << "\n";
    out << "tau,hurst_hat,stderr\n";
    for (const auto& [tau, est] : result.hurst_by_tau)
      out << tau << "," << rvol::format_double(est.value) << ","
          << rvol::format_double(est.stderr_) << "\n";
    manifest.outputs.push_back("bias_curve.csv");
  }
  manifest.results = {
      {"spot_hurst", result.spot_hurst.value},
      {"spot_hurst_stderr", result.spot_hurst.stderr_},
  };
  manifest.write(out_dir);

  std::cout << "simulate: spot hurst = " << result.spot_hurst.value << "\n";
  for (const auto& [tau, est] : result.hurst_by_tau)
    std::cout << "  tau = " << tau << ": hurst = " << est.value << " +- "
              << est.stderr_ << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// market

struct MarketArgs {
  std::string quotes;
  std::string params_path;
  std::string config_path;
  std::string out = ".";
  rvol::MarketConfig market;
  rvol::EstimatorConfig estimator;
  int diag_delta = 1;
};

void load_market_config(MarketArgs& args) {
  if (args.config_path.empty()) return;
  rvol::KeyValueConfig cfg = rvol::KeyValueConfig::from_file(args.config_path);
  auto& m = args.market;
  m.min_mid_price = cfg.get_double("market", "min_mid_price", m.min_mid_price);
  m.min_tau_days =
      static_cast<int>(cfg.get_long("market", "min_tau_days", m.min_tau_days));
  m.max_tau_days =
      static_cast<int>(cfg.get_long("market", "max_tau_days", m.max_tau_days));
  m.settlement_before_bd = static_cast<int>(
      cfg.get_long("market", "settlement_before_bd", m.settlement_before_bd));
  m.settlement_after_bd = static_cast<int>(
      cfg.get_long("market", "settlement_after_bd", m.settlement_after_bd));
  m.moneyness_band =
      cfg.get_double("market", "moneyness_band", m.moneyness_band);
  m.weight_spread_floor =
      cfg.get_double("market", "weight_spread_floor", m.weight_spread_floor);
  m.mad_filter = cfg.get_bool("market", "mad_filter", m.mad_filter);
  m.mad_threshold =
      cfg.get_double("market", "mad_threshold", m.mad_threshold);
  args.estimator.q_grid =
      cfg.get_double_list("estimator", "q_grid", args.estimator.q_grid);
  args.estimator.delta_min = static_cast<int>(
      cfg.get_long("estimator", "delta_min", args.estimator.delta_min));
  args.estimator.delta_max = static_cast<int>(
      cfg.get_long("estimator", "delta_max", args.estimator.delta_max));
  cfg.check();
}

rvol::MsModelParams load_ms_params(const std::string& path) {
  rvol::KeyValueConfig cfg = rvol::KeyValueConfig::from_file(path);
  rvol::MsModelParams p;
  p.beta_rho = cfg.get_double("medvedev", "beta_rho", 0.0);
  p.rho = cfg.get_double("medvedev", "rho", 0.0);
  p.phi = cfg.get_double("medvedev", "phi", 0.0);
  if (cfg.has("medvedev", "lambda0_ejump"))
    p.lambda0_ejump = cfg.get_double("medvedev", "lambda0_ejump", 0.0);
  if (cfg.has("medvedev", "e_jump"))
    p.e_jump = cfg.get_double("medvedev", "e_jump", 0.0);
  p.psi = cfg.get_double("medvedev", "psi", 0.0);
  cfg.check();
  p.validate();
  return p;
}

int run_market(MarketArgs& args) {
  load_market_config(args);

  std::vector<std::string> row_errors;
  const auto quotes = rvol::read_quotes_csv(args.quotes, &row_errors);
  const rvol::MarketResult result =
      rvol::run_market_pipeline(quotes, args.market);

  const fs::path out_dir = prepare_out_dir(args.out);
  Manifest manifest;
  manifest.command = "market";
  manifest.config = {
      {"quotes", args.quotes},
      {"market",
       {{"min_mid_price", args.market.min_mid_price},
        {"min_tau_days", args.market.min_tau_days},
        {"max_tau_days", args.market.max_tau_days},
        {"settlement_before_bd", args.market.settlement_before_bd},
        {"settlement_after_bd", args.market.settlement_after_bd},
        {"moneyness_band", args.market.moneyness_band},
        {"weight_spread_floor", args.market.weight_spread_floor},
        {"mad_filter", args.market.mad_filter},
        {"mad_threshold", args.market.mad_threshold}}},
      {"estimator",
       {{"q_grid", args.estimator.q_grid},
        {"delta_min", args.estimator.delta_min},
        {"delta_max", args.estimator.delta_max}}}};
  manifest.add_input(args.quotes);
  if (!args.params_path.empty()) manifest.add_input(args.params_path);

  {
    auto out = open_output(out_dir / "parity_fits.csv");
    out << "# " << kManifestComment << "\n";
    out << "date,expiry,discount,forward,n_strikes,residual_rms\n";
    for (const auto& f : result.parity_fits)
      out << f.date << "," << f.expiry << ","
          << rvol::format_double(f.discount) << ","
          << rvol::format_double(f.forward) << "," << f.n_strikes_used << ","
          << rvol::format_double(f.residual_rms) << "\n";
    manifest.outputs.push_back("parity_fits.csv");
  }
  {
    auto out = open_output(out_dir / "iv_panel.csv");
    out << "# " << kManifestComment << "\n";
    out << "date,expiry,strike,log_moneyness,implied_vol\n";
    for (const auto& p : result.iv_panel)
      out << p.date << "," << p.expiry << "," << rvol::format_double(p.strike)
          << "," << rvol::format_double(p.log_moneyness) << ","
          << rvol::format_double(p.implied_vol) << "\n";
    manifest.outputs.push_back("iv_panel.csv");
  }
  {
    auto out = open_output(out_dir / "daily_proxy.csv");
    out << "# " << kManifestComment << "\n";
    out << "date,tau_days,implied_vol\n";
    for (const auto& p : result.daily_proxies)
      out << p.date << "," << p.tau_days << ","
          << rvol::format_double(p.sigma_hat) << "\n";
    manifest.outputs.push_back("daily_proxy.csv");
  }
  {
    ordered_json j;
    j["manifest_file"] = kManifestName;
    j["input_rows"] = result.filter_report.input_rows;
    j["rejected_rows"] = row_errors.size();
    j["removed"] = {
        {"bad_maturity", result.filter_report.removed_bad_maturity},
        {"settlement_window", result.filter_report.removed_settlement},
        {"low_price", result.filter_report.removed_low_price},
        {"zero_volume", result.filter_report.removed_zero_volume},
        {"mad_outlier", result.filter_report.removed_mad_outlier}};
    j["retained"] = result.filter_report.retained;
    j["parity_groups"] = result.parity_fits.size();
    j["iv_points"] = result.iv_panel.size();
    j["proxy_dates"] = result.daily_proxies.size();
    j["row_errors"] = row_errors;
    j["pipeline_errors"] = result.errors;
    auto out = open_output(out_dir / "filter_report.json");
    out << j.dump(2) << "\n";
    manifest.outputs.push_back("filter_report.json");
  }

  // Optional Medvedev-Scaillet correction; the estimation stage runs on the
  // corrected series when params are given, else on the raw proxies.
  std::optional<rvol::VolSeries> estimation_series = result.proxy_series_raw;
  if (!args.params_path.empty() && !result.daily_proxies.empty()) {
    const rvol::MsModelParams params = load_ms_params(args.params_path);
    const rvol::ProxySeriesResult corrected =
        rvol::proxy_series(result.daily_proxies, params, rvol::ExpansionTerms{});
    auto out = open_output(out_dir / "ms_proxy.csv");
    out << "# " << kManifestComment << "\n";
    out << "date,tau_days,sigma_hat,sigma_proxy\n";
    std::map<std::string, const rvol::DailyProxy*> raw_by_date;
    for (const auto& p : result.daily_proxies) raw_by_date[p.date] = &p;
    for (std::size_t i = 0; i < corrected.series.size(); ++i) {
      const auto* raw = raw_by_date.at(corrected.series.dates[i]);
      out << raw->date << "," << raw->tau_days << ","
          << rvol::format_double(raw->sigma_hat) << ","
          << rvol::format_double(corrected.sigma_proxy[i]) << "\n";
    }
    manifest.outputs.push_back("ms_proxy.csv");
    for (const auto& w : corrected.warnings) std::cerr << "warning: " << w << "\n";
    estimation_series = corrected.series;
  }

  ordered_json estimation;
  if (estimation_series) {
    const int n = static_cast<int>(estimation_series->size());
    rvol::EstimatorConfig est = args.estimator;
    est.delta_max = std::min(est.delta_max, std::max(3, n - 2));
    if (n >= 8) {
      try {
        const rvol::ScalingReport report =
            rvol::fit_scaling(*estimation_series, est);
        ordered_json diag;
        write_scaling_outputs(report, out_dir, manifest, diag,
                              "scaling_report.json");
        estimation = {{"hurst", report.hurst_hat},
                      {"hurst_stderr", report.hurst_stderr}};
      } catch (const std::invalid_argument& e) {
        // constant proxy series: every m(q, delta) is zero and no slope
        // exists; report the degenerate outcome instead of failing.
        estimation = {{"degenerate", true}, {"reason", e.what()}};
      }
    } else {
      estimation = {{"degenerate", true},
                    {"reason", "fewer than 8 proxy dates"}};
    }
  } else {
    estimation = {{"degenerate", true}, {"reason", "no proxy dates"}};
  }
  manifest.results = {{"estimation", estimation},
                      {"proxy_dates", result.daily_proxies.size()}};
  manifest.write(out_dir);

  std::cout << "market: " << result.filter_report.retained << "/"
            << result.filter_report.input_rows << " quotes retained, "
            << result.parity_fits.size() << " parity fits, "
            << result.daily_proxies.size() << " proxy dates\n";
  if (estimation.contains("hurst"))
    std::cout << "  proxy-series hurst = " << estimation["hurst"] << "\n";
  else
    std::cout << "  estimation degenerate: "
              << estimation["reason"].get<std::string>() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// bias

struct BiasArgs {
  std::string out = ".";
  double hurst = 0.04;
  double theta_min = 1e-2;
  double theta_max = 1e2;
  int theta_points = 200;
  double tau = 0.0;  // enables the m-hat table when > 0 together with nu
  double nu = 0.0;
  int delta_min = 1;
  int delta_max = 40;
};

int run_bias(const BiasArgs& args) {
  if (!(args.hurst > 0.0 && args.hurst < 1.0))
    throw ValidationFailure("bias: --hurst must be in (0, 1)");
  if (args.theta_points < 2 || !(args.theta_min > 0.0) ||
      !(args.theta_max > args.theta_min))
    throw ValidationFailure("bias: bad theta grid");

  const rvol::BiasCurve curve = rvol::bias_curve(
      args.hurst, args.theta_min, args.theta_max, args.theta_points);

  const fs::path out_dir = prepare_out_dir(args.out);
  Manifest manifest;
  manifest.command = "bias";
  manifest.config = {{"hurst", args.hurst},
                     {"theta_min", args.theta_min},
                     {"theta_max", args.theta_max},
                     {"theta_points", args.theta_points},
                     {"tau", args.tau},
                     {"nu", args.nu},
                     {"delta_min", args.delta_min},
                     {"delta_max", args.delta_max}};

  {
    auto out = open_output(out_dir / "f_curve.csv");
    out << "# " << kManifestComment << "\n";
    out << "theta,f_value,error_bound\n";
    for (std::size_t i = 0; i < curve.theta_grid.size(); ++i)
      out << rvol::format_double(curve.theta_grid[i]) << ","
          << rvol::format_double(curve.f_values[i]) << ","
          << rvol::format_double(curve.error_bounds[i]) << "\n";
    manifest.outputs.push_back("f_curve.csv");
  }
  {
    ordered_json j;
    j["manifest_file"] = kManifestName;
    j["hurst"] = curve.h_used;
    j["c_h"] = rvol::c_h(args.hurst);
    j["quadrature_abs_tol"] = 1e-10;
    j["theta_points"] = curve.theta_grid.size();
    auto out = open_output(out_dir / "bias_meta.json");
    out << j.dump(2) << "\n";
    manifest.outputs.push_back("bias_meta.json");
  }
  if (args.tau > 0.0 && args.nu > 0.0) {
    rvol::BiasParams params;
    params.hurst = args.hurst;
    params.nu = args.nu;
    params.v0 = 1.0;
    auto out = open_output(out_dir / "m_table.csv");
    out << "# " << kManifestComment << "\n";
    out << "delta,theta,m_hat\n";
    for (int delta = args.delta_min; delta <= args.delta_max; ++delta) {
      const double theta = args.tau / delta;
      out << delta << "," << rvol::format_double(theta) << ","
          << rvol::format_double(
                 rvol::biased_second_moment(delta, args.tau, params))
          << "\n";
    }
    manifest.outputs.push_back("m_table.csv");
  }
  manifest.write(out_dir);
  std::cout << "bias: " << curve.theta_grid.size()
            << " curve points for H = " << args.hurst << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rough-volatility analysis toolkit"};
  app.set_version_flag("--version", kVersion);
  bool print_config = false;
  app.add_flag("--print-config", print_config,
               "print the full default configuration and exit");

  EstimateArgs est;
  SimulateArgs sim;
  MarketArgs mkt;
  BiasArgs bias;

  auto* cmd_estimate = app.add_subcommand(
      "estimate", "structure-function scaling analysis of a date,value CSV");
  cmd_estimate->add_option("--input", est.input, "input series CSV")
      ->required();
  cmd_estimate->add_option("--out", est.out, "output directory");
  cmd_estimate->add_option("--q-grid", est.q_grid, "moment orders q");
  cmd_estimate->add_option("--delta-min", est.delta_min, "smallest lag (days)");
  cmd_estimate->add_option("--delta-max", est.delta_max, "largest lag (days)");
  cmd_estimate->add_option("--diag-delta", est.diag_delta,
                           "lag for the increment diagnostics");
  cmd_estimate->add_option("--bins", est.bins,
                           "histogram bins (0 = Freedman-Diaconis)");
  cmd_estimate->add_flag("--no-diagnostics", est.skip_diagnostics,
                         "skip the increment diagnostics block");

  auto* cmd_simulate = app.add_subcommand(
      "simulate", "rough-volatility conditional-MC experiment");
  auto* sim_seed =
      cmd_simulate->add_option("--seed", sim.seed, "base seed (overrides config)");
  cmd_simulate->add_option("--workers", sim.workers,
                           "worker threads (0 = logical cores)");
  cmd_simulate->add_option("--out", sim.out, "output directory");
  cmd_simulate->add_option("--config", sim.config_path, "key-value config file");
  cmd_simulate->add_option("--taus", sim.taus,
                           "subset of maturities to run (days)");
  cmd_simulate->add_option("--horizon", sim.model.horizon_days,
                           "spot horizon T in days");
  cmd_simulate->add_option("--paths", sim.mc.n_paths, "MC paths per day");
  cmd_simulate->add_option("--hurst", sim.model.hurst, "Hurst parameter");
  cmd_simulate->add_option("--eta", sim.model.eta, "vol of log-vol per day^H");
  cmd_simulate->add_option("--sigma0", sim.model.sigma0,
                           "initial annualized spot vol");

  auto* cmd_market = app.add_subcommand(
      "market", "option-quote pipeline: filters, parity, ATM implied vols");
  cmd_market->add_option("--quotes", mkt.quotes, "quotes CSV")->required();
  cmd_market->add_option("--params", mkt.params_path,
                         "Medvedev-Scaillet parameter file ([medvedev] section)");
  cmd_market->add_option("--config", mkt.config_path, "key-value config file");
  cmd_market->add_option("--out", mkt.out, "output directory");
  cmd_market->add_option("--diag-delta", mkt.diag_delta, "diagnostics lag");
  cmd_market->add_flag("--mad-filter", mkt.market.mad_filter,
                       "enable the per-date MAD outlier rule");

  auto* cmd_bias =
      app.add_subcommand("bias", "maturity-smoothing bias curve f(theta)");
  cmd_bias->add_option("--hurst", bias.hurst, "Hurst parameter")->required();
  cmd_bias->add_option("--out", bias.out, "output directory");
  cmd_bias->add_option("--theta-min", bias.theta_min, "smallest theta");
  cmd_bias->add_option("--theta-max", bias.theta_max, "largest theta");
  cmd_bias->add_option("--theta-points", bias.theta_points, "curve points");
  cmd_bias->add_option("--tau", bias.tau,
                       "maturity (days) for the m-hat table");
  cmd_bias->add_option("--nu", bias.nu, "vol-of-variance for the m-hat table");
  cmd_bias->add_option("--delta-min", bias.delta_min, "m-hat table lag start");
  cmd_bias->add_option("--delta-max", bias.delta_max, "m-hat table lag end");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (print_config) {
    std::cout << kDefaultConfig;
    return 0;
  }

  try {
    if (cmd_estimate->parsed()) return run_estimate(est);
    if (cmd_simulate->parsed()) {
      sim.seed_given = sim_seed->count() > 0;
      return run_simulate(sim);
    }
    if (cmd_market->parsed()) return run_market(mkt);
    if (cmd_bias->parsed()) return run_bias(bias);
    std::cout << app.help();
    return 0;
  } catch (const rvol::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const rvol::CsvError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ValidationFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
}
