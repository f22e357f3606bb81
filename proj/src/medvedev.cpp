#include "rvol/medvedev.hpp"

#include <cmath>

namespace rvol {

void MsModelParams::validate() const {
  if (rho < -1.0 || rho > 1.0)
    throw std::invalid_argument("MsModelParams: rho must be in [-1, 1]");
  if (phi < 0.0) throw std::invalid_argument("MsModelParams: phi must be >= 0");
  if (psi < 0.0) throw std::invalid_argument("MsModelParams: psi must be >= 0");
  if (beta_rho != 0.0 && rho == 0.0)
    throw std::invalid_argument(
        "MsModelParams: beta_rho != 0 requires rho != 0 (beta = beta_rho/rho)");
  if (lambda0_ejump && *lambda0_ejump != 0.0 &&
      (!e_jump || *e_jump == 0.0))
    throw std::invalid_argument(
        "MsModelParams: lambda0*E[dJ] != 0 requires E[dJ] != 0");
}

double MsModelParams::beta() const {
  if (beta_rho == 0.0) return 0.0;
  return beta_rho / rho;
}

double MsModelParams::lambda0() const {
  if (!lambda0_ejump || *lambda0_ejump == 0.0) return 0.0;
  return *lambda0_ejump / *e_jump;
}

double MsModelParams::jump_product() const {
  return lambda0_ejump ? *lambda0_ejump : 0.0;
}

double spot_proxy(double sigma_hat, double tau_years,
                  const MsModelParams& params, const ExpansionTerms& terms,
                  std::vector<std::string>* warnings) {
  params.validate();
  if (!(sigma_hat > 0.0))
    throw std::invalid_argument("spot_proxy: sigma_hat must be > 0");
  if (!(tau_years > 0.0))
    throw std::invalid_argument("spot_proxy: tau must be > 0");

  const double i1v = terms.i1(sigma_hat);
  const double i2v = terms.i2(sigma_hat);
  double di1;
  if (terms.i1_dsigma) {
    di1 = (*terms.i1_dsigma)(sigma_hat);
  } else {
    const double h = 1e-5 * std::max(sigma_hat, 1.0);
    di1 = (terms.i1(sigma_hat + h) - terms.i1(sigma_hat - h)) / (2.0 * h);
  }

  // 1/2 rho b(s) E[dJ] dlambda/dsigma
  //   = 1/2 (beta rho) (lambda0 E[dJ]) psi s^(phi + psi - 1):
  // only the jointly calibrated products enter.
  double jump_term = 0.0;
  if (params.jump_product() != 0.0 && params.psi != 0.0) {
    if (params.psi < 1.0 && sigma_hat < 0.01 && warnings)
      warnings->push_back(
          "spot_proxy: psi < 1 with sigma_hat = " + std::to_string(sigma_hat) +
          "; dlambda/dsigma diverges as sigma -> 0");
    jump_term = 0.5 * params.beta_rho * params.jump_product() * params.psi *
                std::pow(sigma_hat, params.phi + params.psi - 1.0);
  }

  const double sigma = sigma_hat - i1v * std::sqrt(tau_years) +
                       (i1v * di1 - i2v + jump_term) * tau_years;
  if (!(sigma > 0.0))
    throw ProxyError("spot_proxy: proxy collapsed to " + std::to_string(sigma) +
                     " at sigma_hat = " + std::to_string(sigma_hat) +
                     ", tau = " + std::to_string(tau_years) +
                     "y (expansion invalid at this maturity)");
  return sigma;
}

ProxySeriesResult proxy_series(const std::vector<DailyProxy>& proxies,
                               const MsModelParams& params,
                               const ExpansionTerms& terms) {
  params.validate();
  ProxySeriesResult out;
  std::vector<std::string> dates;
  std::vector<double> values;
  for (const auto& p : proxies) {
    const double tau_years = static_cast<double>(p.tau_days) / 365.0;
    try {
      const double sigma =
          spot_proxy(p.sigma_hat, tau_years, params, terms, &out.warnings);
      dates.push_back(p.date);
      values.push_back(sigma);
    } catch (const ProxyError& e) {
      out.warnings.push_back("dropped " + p.date + ": " + e.what());
    }
  }
  if (values.empty())
    throw ProxyError("proxy_series: every date collapsed; no series left");
  out.sigma_proxy = values;
  out.series = VolSeries::from_values(std::move(dates), std::move(values));
  return out;
}

}  // namespace rvol
