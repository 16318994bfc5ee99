#pragma once

// Best uniform polynomial approximation (Remez exchange) and the fixed
// polynomial constructions consumed by the divergence estimators.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "divest/error.hpp"

namespace divest::approx {

/// Closed interval [lo, hi] with finite lo < hi.
struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  /// Validating constructor; throws Errc::kInvalidDomain.
  static Interval checked(double lo, double hi);

  double width() const noexcept { return hi - lo; }
  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Polynomial in the monomial basis of the raw variable: coeffs[k] multiplies
/// x^k. Coefficients are held in extended precision so that constructions
/// with large alternating coefficients keep their certified error.
struct Polynomial {
  std::vector<long double> coeffs;
  Interval domain;

  std::size_t degree() const noexcept { return coeffs.empty() ? 0 : coeffs.size() - 1; }

  /// Compensated Horner evaluation.
  long double evaluate(long double x) const noexcept;
  double operator()(double x) const noexcept { return static_cast<double>(evaluate(x)); }
};

struct ApproxResult {
  Polynomial poly;
  double levelled_error = 0.0;
  std::vector<double> equioscillation_points;
  int iterations = 0;
};

struct RemezOptions {
  /// Convergence threshold on the relative spread of reference errors.
  double tol = 1e-10;
  int max_iterations = 100;
  /// Sampling density between consecutive reference points when locating
  /// the extrema of the error curve.
  int oversample = 20;
};

/// Thrown when the exchange does not level within max_iterations. Carries the
/// last iterate and its residual spread.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& message, ApproxResult last, double spread);

  const ApproxResult& last_iterate() const noexcept { return last_; }
  double residual_spread() const noexcept { return spread_; }

 private:
  ApproxResult last_;
  double spread_;
};

using RealFunction = std::function<double(double)>;

/// Chebyshev polynomial of the first kind by three-term recurrence; valid for
/// any real x (no arccos).
double chebyshev_t(int k, double x) noexcept;

/// Unique best uniform degree-`degree` approximation of f on `domain`.
/// Chebyshev-extrema initialization, multi-point exchange, golden-section
/// refinement of local extrema.
ApproxResult remez_best_approx(const RealFunction& f, int degree, Interval domain,
                               const RemezOptions& options = {});

/// Approximation targets with fixed definitions, used as coefficient-cache keys.
enum class Target { kXLogX, kSqrt, kLog, kInverse };

const char* target_id(Target target) noexcept;
Target parse_target(const std::string& id);

/// x ln x with 0 ln 0 = 0.
double xlogx(double x) noexcept;

/// Cached best approximation of a named target. `degree` is the polynomial
/// degree. Not valid for Target::kInverse (see cheb_inverse_poly).
ApproxResult best_approx(Target target, int degree, Interval domain);

/// r_{K,0..K+1}: best degree-(K+1) approximation of x ln x on [0, 1].
ApproxResult xlogx_coeffs(int K);

/// a_{K,0..K}: best degree-K approximation of sqrt(z) on [0, 1].
ApproxResult sqrt_coeffs(int K);

/// Best degree-K approximation of ln x on a domain with lo > 0.
ApproxResult log_coeffs(int K, Interval domain);

/// W(s) = s/e for s <= e, ln s otherwise.
double w_bound(double s);

/// Coefficients of Q_K in the normalized variable z = x / delta, scaled so that
/// Q_K(x) = (1/delta) * sum_j c_j (x/delta)^j. Independent of delta.
std::vector<long double> cheb_inverse_normalized(int K);

/// Degree-K polynomial Q_K on [0, delta] with
/// sup_{0 < x <= delta} x^2 |1/x - Q_K(x)| = delta / (K+2)^2.
Polynomial cheb_inverse_poly(int K, double delta);

/// Bernstein operator B_n[f](x) with log-domain binomial weights.
double bernstein_apply(const RealFunction& f, int n, double x);

}  // namespace divest::approx
