#pragma once

// Unbiased estimation of polynomials of a Poisson rate from lattice counts.
// For n * xhat ~ Poi(n q), E prod_{l<j} (xhat - l/n) = q^j.

#include <cstdint>
#include <vector>

namespace divest::unbiased {

/// A normalized count xhat = count / rate with integral count. The rate is
/// real so that split samples (rate / 3) keep their exact lattice.
struct LatticePoint {
  std::int64_t count = 0;
  double rate = 1.0;

  double value() const noexcept { return static_cast<double>(count) / rate; }

  /// Throws Errc::kNonLatticeInput unless rate * xhat is a nonnegative
  /// integer within 1e-9.
  static LatticePoint from_value(double xhat, double rate);
};

/// prod_{k=0}^{j-1} (xhat - k/n); 1 for j = 0.
double falling_factorial_estimate(double xhat, int j, double n);
double falling_factorial_estimate(LatticePoint x, int j) noexcept;

/// sum_k base_coeffs[k] * prod_{l<k} ((xhat - l/rate) / scale): the unbiased
/// estimator of the polynomial sum_k base_coeffs[k] (q/scale)^k. Storing
/// coefficients against q/scale keeps every intermediate bounded at high
/// degree.
class ScaledPolyEstimator {
 public:
  ScaledPolyEstimator(std::vector<long double> base_coeffs, double rate, double scale);

  const std::vector<long double>& base_coeffs() const noexcept { return coeffs_; }
  double rate() const noexcept { return rate_; }
  double scale() const noexcept { return scale_; }

  /// Evaluates at xhat = count / rate with compensated long double summation.
  double evaluate(std::int64_t count) const noexcept;

 private:
  std::vector<long double> coeffs_;
  double rate_;
  double scale_;
};

/// Throws Errc::kNonLatticeInput if xhat is not on the estimator's lattice.
double unbiased_poly_estimate(const ScaledPolyEstimator& est, double xhat);

/// Exact second moment of g_{j,q}(X) = sum_k C(j,k) (-q)^{j-k} prod_{h<k}(X - h/n),
/// the unbiased estimator of (p-q)^j for nX ~ Poi(np).
double falling_factorial_second_moment(int j, double p, double q, double n);

}  // namespace divest::unbiased
