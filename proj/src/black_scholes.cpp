#include "rvol/black_scholes.hpp"

#include <algorithm>
#include <cmath>

namespace rvol {

namespace {
constexpr double kSqrt1_2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kVolLo = 1e-6;
constexpr double kVolHi = 10.0;
}  // namespace

void BsQuote::validate() const {
  if (!(forward > 0.0)) throw std::invalid_argument("BsQuote: forward must be > 0");
  if (!(strike > 0.0)) throw std::invalid_argument("BsQuote: strike must be > 0");
  if (!(tau > 0.0)) throw std::invalid_argument("BsQuote: tau must be > 0");
  if (!(vol > 0.0)) throw std::invalid_argument("BsQuote: vol must be > 0");
  if (!(discount > 0.0) || discount > 1.0)
    throw std::invalid_argument("BsQuote: discount must be in (0, 1]");
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x * kSqrt1_2); }

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double bs_call_price(const BsQuote& q) {
  q.validate();
  const double v = q.vol * std::sqrt(q.tau);
  const double d1 = std::log(q.forward / q.strike) / v + 0.5 * v;
  const double d2 = d1 - v;
  return q.discount * (q.forward * norm_cdf(d1) - q.strike * norm_cdf(d2));
}

double bs_implied_vol(double price, double forward, double strike, double tau,
                      double discount) {
  if (!(forward > 0.0) || !(strike > 0.0) || !(tau > 0.0) ||
      !(discount > 0.0) || discount > 1.0)
    throw std::invalid_argument("bs_implied_vol: invalid quote parameters");

  const double intrinsic = discount * std::max(forward - strike, 0.0);
  const double upper = discount * forward;
  if (!(price > intrinsic))
    throw ImpliedVolError(
        IvFailure::kBelowIntrinsic,
        "bs_implied_vol: price " + std::to_string(price) +
            " at or below intrinsic value " + std::to_string(intrinsic));
  if (!(price < upper))
    throw ImpliedVolError(IvFailure::kAboveForward,
                          "bs_implied_vol: price " + std::to_string(price) +
                              " at or above discounted forward " +
                              std::to_string(upper));

  auto price_at = [&](double vol) {
    return bs_call_price({forward, strike, tau, vol, discount});
  };

  double lo = kVolLo, hi = kVolHi;
  if (price_at(hi) < price)
    throw ImpliedVolError(IvFailure::kAboveBracket,
                          "bs_implied_vol: implied vol exceeds bracket top " +
                              std::to_string(kVolHi));
  if (price_at(lo) >= price)
    throw ImpliedVolError(IvFailure::kBelowBracket,
                          "bs_implied_vol: implied vol below bracket floor " +
                              std::to_string(kVolLo));

  // Coarse bisection.
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    if (price_at(mid) < price)
      lo = mid;
    else
      hi = mid;
  }

  // Newton polish, safeguarded by the remaining bracket. Converges in vol
  // space (bracket width 1e-13), not on a price residual: deep OTM quotes
  // have price and vega vanish together, so a price tolerance would stop
  // long before the vol digits are settled.
  const double sqrt_tau = std::sqrt(tau);
  double vol = 0.5 * (lo + hi);
  for (int it = 0; it < 120; ++it) {
    if (hi - lo <= 1e-13 * std::max(1.0, vol)) break;
    const double p = price_at(vol);
    const double diff = p - price;
    if (diff == 0.0) break;
    if (diff > 0.0)
      hi = vol;
    else
      lo = vol;
    const double v = vol * sqrt_tau;
    const double d1 = std::log(forward / strike) / v + 0.5 * v;
    const double vega = discount * forward * norm_pdf(d1) * sqrt_tau;
    double next = vol - diff / vega;
    if (!(vega > 0.0) || !(next > lo) || !(next < hi))
      next = 0.5 * (lo + hi);
    vol = next;
  }
  return vol;
}

}  // namespace rvol
