#include "divest/approx.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "divest/coefficient_cache.hpp"
#include "divest/numeric.hpp"

namespace divest::approx {

Interval Interval::checked(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw Error(Errc::kInvalidDomain, "interval requires finite lo < hi, got [" +
                                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return Interval{lo, hi};
}

long double Polynomial::evaluate(long double x) const noexcept {
  return numeric::compensated_horner(coeffs, x);
}

NonConvergence::NonConvergence(const std::string& message, ApproxResult last, double spread)
    : Error(Errc::kNonConvergence,
            message + " (residual spread " + std::to_string(spread) + ")"),
      last_(std::move(last)),
      spread_(spread) {}

double chebyshev_t(int k, double x) noexcept {
  if (k <= 0) return 1.0;
  double prev = 1.0, cur = x;
  for (int j = 1; j < k; ++j) {
    const double next = 2.0 * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

const char* target_id(Target target) noexcept {
  switch (target) {
    case Target::kXLogX: return "xlogx";
    case Target::kSqrt: return "sqrt";
    case Target::kLog: return "log";
    case Target::kInverse: return "invx";
  }
  return "unknown";
}

Target parse_target(const std::string& id) {
  if (id == "xlogx") return Target::kXLogX;
  if (id == "sqrt") return Target::kSqrt;
  if (id == "log") return Target::kLog;
  if (id == "invx") return Target::kInverse;
  throw Error(Errc::kInvalidParams, "unknown approximation target '" + id + "'");
}

double xlogx(double x) noexcept { return x == 0.0 ? 0.0 : x * std::log(x); }

namespace {

RealFunction target_function(Target target) {
  switch (target) {
    case Target::kXLogX: return xlogx;
    case Target::kSqrt: return [](double x) { return std::sqrt(x); };
    case Target::kLog: return [](double x) { return std::log(x); };
    case Target::kInverse: break;
  }
  throw Error(Errc::kInvalidParams, "target has no Remez definition");
}

void check_target_domain(Target target, Interval domain) {
  switch (target) {
    case Target::kXLogX:
    case Target::kSqrt:
      if (domain.lo < 0.0) throw Error(Errc::kInvalidDomain, "target requires lo >= 0");
      break;
    case Target::kLog:
      if (domain.lo <= 0.0) throw Error(Errc::kInvalidDomain, "ln x requires lo > 0");
      break;
    case Target::kInverse:
      break;
  }
}

using MemoKey = std::tuple<int, int, double, double>;

std::mutex& memo_mutex() {
  static std::mutex m;
  return m;
}

std::map<MemoKey, ApproxResult>& memo() {
  static std::map<MemoKey, ApproxResult> m;
  return m;
}

}  // namespace

ApproxResult best_approx(Target target, int degree, Interval domain) {
  domain = Interval::checked(domain.lo, domain.hi);
  check_target_domain(target, domain);
  if (degree < 0) throw Error(Errc::kInvalidParams, "degree must be >= 0");
  const MemoKey mkey{static_cast<int>(target), degree, domain.lo, domain.hi};
  {
    std::lock_guard lock(memo_mutex());
    if (auto it = memo().find(mkey); it != memo().end()) return it->second;
  }

  const CacheKey key{target_id(target), degree, domain};
  const CoefficientCache cache(CoefficientCache::default_directory());
  std::optional<ApproxResult> result = cache.load(key);
  if (!result) {
    result = remez_best_approx(target_function(target), degree, domain);
    cache.store(key, *result);
  }

  std::lock_guard lock(memo_mutex());
  return memo().emplace(mkey, std::move(*result)).first->second;
}

ApproxResult xlogx_coeffs(int K) {
  if (K < 1) throw Error(Errc::kInvalidParams, "xlogx_coeffs requires K >= 1");
  return best_approx(Target::kXLogX, K + 1, Interval{0.0, 1.0});
}

ApproxResult sqrt_coeffs(int K) {
  if (K < 1) throw Error(Errc::kInvalidParams, "sqrt_coeffs requires K >= 1");
  return best_approx(Target::kSqrt, K, Interval{0.0, 1.0});
}

ApproxResult log_coeffs(int K, Interval domain) {
  if (K < 0) throw Error(Errc::kInvalidParams, "log_coeffs requires K >= 0");
  return best_approx(Target::kLog, K, domain);
}

double w_bound(double s) {
  if (!(s > 0.0)) throw Error(Errc::kInvalidParams, "W(s) requires s > 0");
  return s <= std::numbers::e ? s / std::numbers::e : std::log(s);
}

std::vector<long double> cheb_inverse_normalized(int K) {
  if (K < 0) throw Error(Errc::kInvalidParams, "cheb_inverse_poly requires K >= 0");
  const int N = K + 2;
  const int deg = 2 * N;
  // Monomial coefficients of T_{2N}(y), built by the three-term recurrence.
  std::vector<long double> prev(deg + 1, 0.0L), cur(deg + 1, 0.0L), next(deg + 1, 0.0L);
  prev[0] = 1.0L;
  cur[1] = 1.0L;
  for (int k = 1; k < deg; ++k) {
    std::fill(next.begin(), next.end(), 0.0L);
    for (int j = 0; j < deg; ++j) next[j + 1] += 2.0L * cur[j];
    for (int j = 0; j <= deg; ++j) next[j] -= prev[j];
    std::swap(prev, cur);
    std::swap(cur, next);
  }
  // T_{2N}(y) = S_{2K}(y) y^4 - 2(-1)^K N^2 y^2 + (-1)^K, and S_{2K} is even:
  // S_{2K}(y) = sum_j s_j y^{2j} with s_j the y^{2j+4} coefficient of T_{2N}.
  const long double sign = (K % 2 == 0) ? 1.0L : -1.0L;
  const long double denom = 2.0L * N * N;
  std::vector<long double> q(K + 1);
  for (int j = 0; j <= K; ++j) q[j] = sign * cur[2 * j + 4] / denom;
  return q;
}

Polynomial cheb_inverse_poly(int K, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw Error(Errc::kInvalidParams, "cheb_inverse_poly requires delta > 0");
  }
  std::vector<long double> q = cheb_inverse_normalized(K);
  const long double d = delta;
  for (std::size_t j = 0; j < q.size(); ++j) {
    q[j] /= std::pow(d, static_cast<long double>(j + 1));
  }
  return Polynomial{std::move(q), Interval{0.0, delta}};
}

double bernstein_apply(const RealFunction& f, int n, double x) {
  if (n < 1) throw Error(Errc::kInvalidParams, "Bernstein degree must be >= 1");
  if (!(x >= 0.0 && x <= 1.0)) throw Error(Errc::kInvalidDomain, "Bernstein operator needs x in [0,1]");
  if (x == 0.0) return f(0.0);
  if (x == 1.0) return f(1.0);
  // Weights: log-domain anchor at the mode, ratio recurrence outward,
  // normalized to unit sum.
  const int mode = std::clamp(static_cast<int>(std::floor((n + 1) * x)), 0, n);
  const double log_mode = std::lgamma(n + 1.0) - std::lgamma(mode + 1.0) - std::lgamma(n - mode + 1.0) +
                          mode * std::log(x) + (n - mode) * std::log1p(-x);
  const double odds = x / (1.0 - x);
  std::vector<double> w(static_cast<std::size_t>(n) + 1, 0.0);
  w[mode] = std::exp(log_mode);
  for (int i = mode; i < n && w[i] > 0.0; ++i) w[i + 1] = w[i] * odds * (n - i) / (i + 1.0);
  for (int i = mode; i > 0 && w[i] > 0.0; --i) w[i - 1] = w[i] / odds * i / (n - i + 1.0);
  numeric::CompensatedSum<double> total, sum;
  for (int i = 0; i <= n; ++i) {
    if (w[i] == 0.0) continue;
    total.add(w[i]);
    sum.add(w[i] * f(static_cast<double>(i) / n));
  }
  return sum.value() / total.value();
}

}  // namespace divest::approx
