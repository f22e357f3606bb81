#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rvol/series.hpp"

namespace rvol {

// Parameter set of the two-factor jump-diffusion stochastic volatility model
// behind the short-maturity correction, with the parametric forms
// b(sigma) = beta sigma^phi and lambda(sigma) = lambda0 sigma^psi. The
// calibration table reports beta*rho and lambda0*E[dJ] jointly, which is all
// the expansion needs; the individual factors are derived only to validate
// the inputs.
struct MsModelParams {
  double beta_rho = 0.0;                  // beta * rho
  double rho = 0.0;                       // in [-1, 1]
  double phi = 0.0;                       // >= 0
  std::optional<double> lambda0_ejump;    // lambda0 * E[dJ]; absent = no jumps
  std::optional<double> e_jump;           // E[dJ]
  double psi = 0.0;                       // >= 0

  void validate() const;
  double beta() const;     // beta_rho / rho (0 when beta_rho = 0)
  double lambda0() const;  // lambda0_ejump / e_jump (0 in the no-jump case)
  double jump_product() const;  // lambda0 * E[dJ], 0 when absent
};

// The I1, I2 expansion coefficients are defined in the external reference
// and plug in here; the defaults are identically zero, which makes the
// correction the identity map. i1_dsigma may supply the analytic derivative;
// otherwise a central finite difference with step 1e-5 * max(sigma, 1) is
// used.
struct ExpansionTerms {
  std::function<double(double)> i1 = [](double) { return 0.0; };
  std::function<double(double)> i2 = [](double) { return 0.0; };
  std::optional<std::function<double(double)>> i1_dsigma;
};

struct ProxyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Second-order short-maturity correction of an ATM implied vol into a spot
// vol estimate:
//   sigma = sigma_hat - I1(sigma_hat) sqrt(tau)
//         + (I1 dI1/dsigma - I2 + 1/2 rho b(sigma_hat) E[dJ]
//            dlambda(sigma_hat)/dsigma) tau
// with tau in years. Throws ProxyError when the expansion collapses to a
// nonpositive value. Warnings (psi < 1 with sigma_hat near 0) are appended
// to `warnings` when provided.
double spot_proxy(double sigma_hat, double tau_years, const MsModelParams& params,
                  const ExpansionTerms& terms,
                  std::vector<std::string>* warnings = nullptr);

struct DailyProxy {
  std::string date;
  int tau_days = 0;
  double sigma_hat = 0.0;
};

struct ProxySeriesResult {
  VolSeries series;                    // corrected series, collapsed dates dropped
  std::vector<double> sigma_proxy;     // aligned with series.dates
  std::vector<std::string> warnings;   // collapse drops and domain warnings
};

// Applies spot_proxy date by date; tau is converted from calendar days to
// years (ACT/365) at this boundary.
ProxySeriesResult proxy_series(const std::vector<DailyProxy>& proxies,
                               const MsModelParams& params,
                               const ExpansionTerms& terms);

}  // namespace rvol
