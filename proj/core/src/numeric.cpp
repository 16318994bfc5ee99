#include "divest/numeric.hpp"

#include <algorithm>
#include <cfloat>

namespace divest::numeric {

namespace {

template <typename T>
constexpr T splitter() {
  if constexpr (sizeof(T) == sizeof(double)) {
    return T(134217729.0);  // 2^27 + 1
  } else {
    static_assert(LDBL_MANT_DIG == 64 || LDBL_MANT_DIG == 53);
    return LDBL_MANT_DIG == 64 ? T(4294967297.0L) : T(134217729.0L);  // 2^32 + 1
  }
}

template <typename T>
void split(T a, T& hi, T& lo) noexcept {
  const T c = splitter<T>() * a;
  hi = c - (c - a);
  lo = a - hi;
}

}  // namespace

template <typename T>
void two_prod(T a, T b, T& prod, T& err) noexcept {
  prod = a * b;
  T ah, al, bh, bl;
  split(a, ah, al);
  split(b, bh, bl);
  err = al * bl - (((prod - ah * bh) - al * bh) - ah * bl);
}

template void two_prod<double>(double, double, double&, double&) noexcept;
template void two_prod<long double>(long double, long double, long double&,
                                    long double&) noexcept;

double pairwise_sum(std::span<const double> values) noexcept {
  constexpr std::size_t kBlock = 16;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double symmetric_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return pairwise_sum(values);
}

long double compensated_horner(std::span<const long double> coeffs, long double x) noexcept {
  if (coeffs.empty()) return 0.0L;
  long double s = coeffs.back();
  long double c = 0.0L;
  for (std::size_t i = coeffs.size() - 1; i-- > 0;) {
    long double p, pi, sigma;
    two_prod(s, x, p, pi);
    two_sum(p, coeffs[i], s, sigma);
    c = c * x + (pi + sigma);
  }
  return s + c;
}

}  // namespace divest::numeric
