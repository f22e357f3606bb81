#pragma once

#include <stdexcept>
#include <string>

namespace rvol {

// Call quote on a forward. `tau` and `vol` must share a time unit (vol per
// square root of the unit of tau); the price only depends on vol*sqrt(tau).
// Under zero rates the forward equals the spot.
struct BsQuote {
  double forward = 0.0;   // spot or forward, > 0
  double strike = 0.0;    // > 0
  double tau = 0.0;       // time to maturity, > 0
  double vol = 0.0;       // > 0
  double discount = 1.0;  // in (0, 1]

  void validate() const;
};

double norm_cdf(double x);
double norm_pdf(double x);

// Discounted Black call on the forward: D * (F N(d1) - K N(d2)).
double bs_call_price(const BsQuote& q);

enum class IvFailure {
  kBelowIntrinsic,  // price <= discounted intrinsic value
  kAboveForward,    // price >= discounted forward
  kAboveBracket,    // root above the vol bracket [1e-6, 10]
  kBelowBracket,    // root below the vol bracket
};

struct ImpliedVolError : std::runtime_error {
  ImpliedVolError(IvFailure kind, const std::string& msg)
      : std::runtime_error(msg), kind(kind) {}
  IvFailure kind;
};

// Inverts bs_call_price in vol. Bisection on [1e-6, 10] down to 1e-4, then
// bracket-safeguarded Newton; the returned vol reproduces the input price to
// better than 1e-10 absolute. Throws ImpliedVolError outside the open
// no-arbitrage interval (intrinsic, discounted forward).
double bs_implied_vol(double price, double forward, double strike, double tau,
                      double discount);

}  // namespace rvol
