#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace divest::numeric {

/// Error-free transformation: a + b == sum + err exactly.
template <typename T>
constexpr void two_sum(T a, T b, T& sum, T& err) noexcept {
  sum = a + b;
  const T bv = sum - a;
  err = (a - (sum - bv)) + (b - bv);
}

/// Error-free product via Veltkamp splitting (no FMA requirement).
template <typename T>
void two_prod(T a, T b, T& prod, T& err) noexcept;

/// Running sum with Neumaier compensation.
template <typename T>
class CompensatedSum {
 public:
  void add(T x) noexcept {
    T s, e;
    two_sum(sum_, x, s, e);
    sum_ = s;
    comp_ += e;
  }
  T value() const noexcept { return sum_ + comp_; }

 private:
  T sum_{0};
  T comp_{0};
};

/// Fixed-order pairwise summation; the result depends only on the input order.
double pairwise_sum(std::span<const double> values) noexcept;

/// Pairwise sum of the values in ascending order; invariant under any
/// permutation of the input.
double symmetric_sum(std::vector<double> values);

/// Compensated Horner evaluation (as accurate as Horner in twice the working
/// precision) of sum_k coeffs[k] * x^k.
long double compensated_horner(std::span<const long double> coeffs, long double x) noexcept;

}  // namespace divest::numeric
