#include "selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <string>

#include "divest/approx.hpp"
#include "divest/unbiased.hpp"

namespace divest::cli {

namespace {

double poisson_pmf(std::int64_t k, double lambda) {
  if (lambda == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(k * std::log(lambda) - lambda - std::lgamma(k + 1.0));
}

// Sum of pmf(k) * g(k) over k until the remaining tail mass is below 1e-14.
double poisson_expectation(double lambda, const std::function<double(std::int64_t)>& g) {
  double acc = 0.0, mass = 0.0;
  for (std::int64_t k = 0;; ++k) {
    const double w = poisson_pmf(k, lambda);
    acc += w * g(k);
    mass += w;
    if (k > lambda && 1.0 - mass < 1e-14) break;
    if (k > 10 * lambda + 200) break;
  }
  return acc;
}

bool check_chebyshev() {
  return approx::chebyshev_t(0, 0.3) == 1.0 && std::abs(approx::chebyshev_t(2, 0.5) + 0.5) < 1e-15 &&
         approx::chebyshev_t(4, 1.0) == 1.0;
}

bool check_remez_square() {
  const auto r = approx::remez_best_approx([](double x) { return x * x; }, 1,
                                           approx::Interval{-1.0, 1.0});
  return std::abs(r.levelled_error - 0.5) < 1e-12 && std::abs(r.poly(0.3) - 0.5) < 1e-12;
}

bool check_equioscillation() {
  const auto r = approx::best_approx(approx::Target::kXLogX, 10, approx::Interval{0.0, 1.0});
  if (r.equioscillation_points.size() != 12) return false;
  double prev_sign = 0.0;
  for (double x : r.equioscillation_points) {
    const double e = approx::xlogx(x) - r.poly(x);
    if (std::abs(std::abs(e) - r.levelled_error) > 1e-6 * r.levelled_error) return false;
    if (prev_sign != 0.0 && std::signbit(e) == std::signbit(prev_sign)) return false;
    prev_sign = e;
  }
  return true;
}

bool check_cheb_inverse() {
  for (int K = 0; K <= 12; ++K) {
    const auto q = approx::cheb_inverse_poly(K, 1.0);
    double worst = 0.0;
    for (int i = 1; i <= 20000; ++i) {
      const double x = i / 20000.0;
      worst = std::max(worst, std::abs(x - x * x * q(x)));
    }
    const double target = 1.0 / ((K + 2.0) * (K + 2.0));
    if (std::abs(worst - target) > 1e-4 * target) return false;
  }
  return true;
}

bool check_unbiasedness() {
  for (double n : {20.0, 50.0}) {
    for (double q : {0.02, 0.1, 0.5}) {
      for (int j = 0; j <= 8; ++j) {
        const double mean = poisson_expectation(n * q, [&](std::int64_t k) {
          return unbiased::falling_factorial_estimate(unbiased::LatticePoint{k, n}, j);
        });
        if (std::abs(mean - std::pow(q, j)) > 1e-10) return false;
      }
    }
  }
  return true;
}

bool check_second_moment() {
  const double n = 30.0;
  for (int j = 0; j <= 4; ++j) {
    for (auto [p, q] : {std::pair{0.1, 0.0}, std::pair{0.2, 0.05}}) {
      const double exact = poisson_expectation(n * p, [&](std::int64_t k) {
        double g = 0.0;
        double binom = 1.0;
        for (int i = 0; i <= j; ++i) {
          if (i > 0) binom = binom * (j - i + 1) / i;
          g += binom * std::pow(-q, j - i) *
               unbiased::falling_factorial_estimate(unbiased::LatticePoint{k, n}, i);
        }
        return g * g;
      });
      const double closed = unbiased::falling_factorial_second_moment(j, p, q, n);
      if (std::abs(exact - closed) > 1e-9 * std::max(1.0, std::abs(closed))) return false;
    }
  }
  return true;
}

bool check_bernstein() {
  const auto sq = [](double x) { return x * x; };
  if (std::abs(approx::bernstein_apply(sq, 4, 0.5) - 0.3125) > 1e-14) return false;
  for (double x : {0.0, 0.17, 0.5, 1.0}) {
    if (std::abs(approx::bernstein_apply([](double t) { return 2.0 * t - 1.0; }, 100, x) -
                 (2.0 * x - 1.0)) > 1e-12) {
      return false;
    }
  }
  return true;
}

bool check_w_bound() {
  return std::abs(approx::w_bound(std::exp(1.0)) - 1.0) < 1e-15 &&
         std::abs(approx::w_bound(std::exp(2.0)) - 2.0) < 1e-15;
}

}  // namespace

int run_selftest(std::ostream& out) {
  struct Check {
    const char* name;
    bool (*run)();
  };
  const Check checks[] = {
      {"chebyshev recurrence", check_chebyshev},
      {"remez x^2 on [-1,1]", check_remez_square},
      {"remez x ln x equioscillation", check_equioscillation},
      {"inverse polynomial exact error", check_cheb_inverse},
      {"falling factorial unbiasedness", check_unbiasedness},
      {"falling factorial second moment", check_second_moment},
      {"bernstein operator", check_bernstein},
      {"W bound", check_w_bound},
  };
  int failures = 0;
  for (const auto& c : checks) {
    bool ok = false;
    std::string note;
    try {
      ok = c.run();
    } catch (const std::exception& e) {
      note = std::string(" (") + e.what() + ")";
    }
    out << (ok ? "PASS " : "FAIL ") << c.name << note << '\n';
    if (!ok) ++failures;
  }
  return failures;
}

}  // namespace divest::cli
