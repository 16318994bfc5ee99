#include "divest/unbiased.hpp"

#include <cmath>
#include <string>

#include "divest/error.hpp"
#include "divest/numeric.hpp"

namespace divest::unbiased {

LatticePoint LatticePoint::from_value(double xhat, double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw Error(Errc::kInvalidParams, "rate must be positive");
  }
  const double scaled = xhat * rate;
  const double rounded = std::round(scaled);
  if (!std::isfinite(scaled) || rounded < 0.0 || std::abs(scaled - rounded) > 1e-9) {
    throw Error(Errc::kNonLatticeInput, "value " + std::to_string(xhat) +
                                            " is not a nonnegative multiple of 1/" +
                                            std::to_string(rate));
  }
  return LatticePoint{static_cast<std::int64_t>(rounded), rate};
}

double falling_factorial_estimate(LatticePoint x, int j) noexcept {
  double prod = 1.0;
  for (int k = 0; k < j; ++k) {
    if (k == x.count) return 0.0;
    prod *= static_cast<double>(x.count - k) / x.rate;
  }
  return prod;
}

double falling_factorial_estimate(double xhat, int j, double n) {
  if (j < 0) throw Error(Errc::kInvalidParams, "falling factorial order must be >= 0");
  return falling_factorial_estimate(LatticePoint::from_value(xhat, n), j);
}

ScaledPolyEstimator::ScaledPolyEstimator(std::vector<long double> base_coeffs, double rate, double scale)
    : coeffs_(std::move(base_coeffs)), rate_(rate), scale_(scale) {
  if (!(rate_ >= 1.0) || !std::isfinite(rate_)) throw Error(Errc::kInvalidParams, "rate must be >= 1");
  if (!(scale_ > 0.0) || !std::isfinite(scale_)) throw Error(Errc::kInvalidParams, "scale must be > 0");
  for (long double c : coeffs_) {
    if (!std::isfinite(c)) throw Error(Errc::kInvalidParams, "coefficients must be finite");
  }
}

double ScaledPolyEstimator::evaluate(std::int64_t count) const noexcept {
  if (coeffs_.empty()) return 0.0;
  const long double denom = static_cast<long double>(rate_) * scale_;
  numeric::CompensatedSum<long double> sum;
  sum.add(coeffs_[0]);
  long double prod = 1.0L;
  for (std::size_t k = 1; k < coeffs_.size(); ++k) {
    const auto l = static_cast<std::int64_t>(k - 1);
    if (l == count) break;  // every further product contains the factor (count - count)
    prod *= static_cast<long double>(count - l) / denom;
    sum.add(coeffs_[k] * prod);
  }
  return static_cast<double>(sum.value());
}

double unbiased_poly_estimate(const ScaledPolyEstimator& est, double xhat) {
  return est.evaluate(LatticePoint::from_value(xhat, est.rate()).count);
}

double falling_factorial_second_moment(int j, double p, double q, double n) {
  if (j < 0) throw Error(Errc::kInvalidParams, "order must be >= 0");
  if (!(n > 0.0) || p < 0.0 || q < 0.0) throw Error(Errc::kInvalidParams, "need p, q >= 0 and n > 0");
  const double d2 = (p - q) * (p - q);
  numeric::CompensatedSum<double> sum;
  double binom = 1.0;   // C(j, k)
  double fact_term = 1.0;  // p^k k! / n^k
  for (int k = 0; k <= j; ++k) {
    if (k > 0) {
      binom = binom * (j - k + 1) / k;
      fact_term *= p * k / n;
    }
    sum.add(binom * binom * std::pow(d2, j - k) * fact_term);
  }
  return sum.value();
}

}  // namespace divest::unbiased
