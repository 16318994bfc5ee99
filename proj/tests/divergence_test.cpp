#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "divest/error.hpp"
#include "divest/approx.hpp"
#include "divest/divergence.hpp"
#include "divest/harness.hpp"
#include "divest/sampling.hpp"
#include "divest/unbiased.hpp"

namespace dv = divest::divergence;
using divest::EstimatorConfig;
using divest::Errc;
using divest::Histogram;
using divest::Regime;
using divest::SplitSamples;

namespace {

SplitSamples make_split(std::vector<std::vector<std::int64_t>> parts, double rate) {
  SplitSamples s;
  s.rate = rate;
  for (int k = 0; k < 3; ++k) s.parts[k] = Histogram{parts[k], rate};
  return s;
}

SplitSamples zeros(std::size_t S, double rate) {
  std::vector<std::int64_t> z(S, 0);
  return make_split({z, z, z}, rate);
}

SplitSamples permuted(const SplitSamples& s, const std::vector<std::size_t>& perm) {
  SplitSamples out = s;
  for (int k = 0; k < 3; ++k) {
    for (std::size_t i = 0; i < perm.size(); ++i) out.parts[k].counts[i] = s.parts[k].counts[perm[i]];
  }
  return out;
}

SplitSamples with_unseen_symbol(SplitSamples s) {
  for (auto& part : s.parts) part.counts.push_back(0);
  return s;
}

// sum_{k<=3} G^(k)(q1)/k! sum_j C(k,j) S_j(q2) (-q1)^(k-j), with S_j the
// falling-factorial estimate of q^j; derivs[k] = G^(k)(q1)/k!.
long double taylor_correction(const long double derivs[4], double q1, std::int64_t c2, double n) {
  const long double binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
  long double total = 0.0L;
  for (int k = 0; k <= 3; ++k) {
    long double inner = 0.0L;
    for (int j = 0; j <= k; ++j) {
      long double sj = 1.0L;
      for (int h = 0; h < j; ++h) sj *= (static_cast<long double>(c2) - h) / n;
      inner += binom[k][j] * sj * std::pow(-static_cast<long double>(q1), k - j);
    }
    total += derivs[k] * inner;
  }
  return total;
}

}  // namespace

TEST(Config, DerivedQuantities) {
  EstimatorConfig cfg;
  cfg.c1 = 1.0;
  cfg.c2 = 1.6;
  EXPECT_EQ(cfg.degree(1000.0), static_cast<int>(std::lround(1.6 * std::log(1000.0))));
  EXPECT_EQ(cfg.degree(3.0), 2);
  EXPECT_DOUBLE_EQ(cfg.threshold(100.0), std::log(100.0) / 100.0);
  EXPECT_DOUBLE_EQ(cfg.delta(100.0), 2.0 * std::log(100.0) / 100.0);
  cfg.truncate = 0.0;
  EXPECT_THROW(cfg.validate(), divest::Error);
}

TEST(ClassifyRegime, Examples) {
  EXPECT_EQ(dv::classify_regime(0.0, 100, 1.0), Regime::kNonSmooth);
  EXPECT_EQ(dv::classify_regime(1.0, 100, 1.0), Regime::kSmooth);
  EXPECT_EQ(dv::classify_regime(std::log(100.0) / 100.0, 100, 1.0), Regime::kNonSmooth);
  EXPECT_EQ(dv::classify_regime(std::nextafter(std::log(100.0) / 100.0, 1.0), 100, 1.0),
            Regime::kSmooth);
}

TEST(KlSmoothTerm, Examples) {
  EXPECT_EQ(dv::kl_smooth_term(0.3, 0.0, 0.2, 100), 0.0);
  EXPECT_EQ(dv::kl_smooth_term(0.0, 0.1, 0.2, 100), 0.0);
  const double p = 0.2, q = 0.15, n = 100;
  EXPECT_NEAR(dv::kl_smooth_term(p, q, q, n),
              p * (std::log(q) + 1.0 / (2 * n * q) + 2.0 / (3 * n * n * q * q)), 1e-15);
}

TEST(KlSmoothTerm, AgreesWithTaylorCorrectionOracle) {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<std::int64_t> count(1, 80);
  const double rates[] = {30.0, 100.0, 1000.0 / 3.0, 5000.0};
  for (int t = 0; t < 100; ++t) {
    const double n = rates[t % 4], m = rates[(t + 1) % 4];
    const std::int64_t c1 = count(gen), c2 = count(gen) - 1, cp = count(gen);
    const double q1 = c1 / n, q2 = c2 / n, p = cp / m;
    const long double lq = q1;
    const long double derivs[4] = {std::log(lq), 1.0L / lq, -1.0L / (2 * lq * lq),
                                   1.0L / (3 * lq * lq * lq)};
    const double oracle = static_cast<double>(p * taylor_correction(derivs, q1, c2, n));
    const double got = dv::kl_smooth_term(p, q1, q2, n);
    EXPECT_NEAR(got, oracle, 1e-12 * std::abs(oracle)) << "n " << n << " c1 " << c1 << " c2 " << c2;
  }
}

TEST(Chi2SmoothTerm, Examples) {
  EXPECT_EQ(dv::chi2_smooth_term(0.3, 0.0, 0.2, 100, 100), 0.0);
  EXPECT_EQ(dv::chi2_smooth_term(0.0, 0.1, 0.2, 100, 100), 0.0);
  EXPECT_EQ(dv::chi2_smooth_term(0.01, 0.1, 0.2, 100, 100), 0.0);
  const double p = 0.2, q = 0.15, m = 80, n = 100;
  EXPECT_NEAR(dv::chi2_smooth_term(p, q, q, m, n),
              p * (p - 1 / m) * (1 / q - 1 / (n * q * q) - 2 / (n * n * q * q * q)), 1e-14);
}

TEST(Chi2SmoothTerm, AgreesWithTaylorCorrectionOracle) {
  std::mt19937_64 gen(6);
  std::uniform_int_distribution<std::int64_t> count(1, 80);
  const double rates[] = {30.0, 100.0, 1000.0 / 3.0, 5000.0};
  for (int t = 0; t < 100; ++t) {
    const double n = rates[t % 4], m = rates[(t + 2) % 4];
    const std::int64_t c1 = count(gen), c2 = count(gen) - 1, cp = count(gen);
    const double q1 = c1 / n, q2 = c2 / n, p = cp / m;
    const long double lq = q1;
    const long double derivs[4] = {1.0L / lq, -1.0L / (lq * lq), 1.0L / (lq * lq * lq),
                                   -1.0L / (lq * lq * lq * lq)};
    const long double pp = static_cast<long double>(cp) * (cp - 1) / (static_cast<long double>(m) * m);
    const double oracle = static_cast<double>(pp * taylor_correction(derivs, q1, c2, n));
    const double got = dv::chi2_smooth_term(p, q1, q2, m, n);
    EXPECT_NEAR(got, oracle, 1e-12 * std::abs(oracle)) << "n " << n << " c1 " << c1 << " c2 " << c2;
  }
}

TEST(KlNonSmoothTerm, ExamplesAndOracle) {
  const EstimatorConfig cfg;
  const double n = 1000.0;
  EXPECT_EQ(dv::kl_nonsmooth_term(0.0, 0.004, n, cfg), 0.0);

  const int K = cfg.degree(n);
  const double delta = cfg.delta(n);
  const auto& r = divest::approx::xlogx_coeffs(K).poly.coeffs;
  const double g1 = static_cast<double>(r[1]) + std::log(delta);
  EXPECT_NEAR(dv::kl_nonsmooth_term(0.01, 0.0, n, cfg), std::clamp(0.01 * g1, -1.0, 1.0), 1e-15);
  EXPECT_EQ(dv::kl_nonsmooth_term(1.0, 0.0, n, cfg), -cfg.truncate);

  for (std::int64_t c = 0; c <= 120; ++c) {
    long double raw = 0.0L, prod = 1.0L;
    for (int k = 0; k <= K; ++k) {
      if (k > 0) prod *= (static_cast<long double>(c) - (k - 1)) / (n * static_cast<long double>(delta));
      const long double g = static_cast<long double>(r[k + 1]) + (k == 0 ? std::log(delta) : 0.0);
      raw += g * prod;
    }
    const double p = 0.003;
    const double expected = std::clamp(static_cast<double>(p * raw), -cfg.truncate, cfg.truncate);
    const double got = dv::kl_nonsmooth_term(p, c / n, n, cfg);
    EXPECT_NEAR(got, expected, 1e-12 * (1.0 + std::abs(expected))) << "count " << c;
    EXPECT_LE(std::abs(got), cfg.truncate);
  }
  EXPECT_THROW(dv::kl_nonsmooth_term(0.1, 0.0015, n, cfg), divest::Error);
}

TEST(KlNonSmoothTerm, RespectsCustomTruncation) {
  EstimatorConfig cfg;
  cfg.truncate = 0.25;
  for (std::int64_t c = 0; c <= 200; ++c) {
    EXPECT_LE(std::abs(dv::kl_nonsmooth_term(0.5, c / 500.0, 500.0, cfg)), 0.25);
  }
}

TEST(Entropy, UpperExamples) {
  EXPECT_DOUBLE_EQ(dv::entropy_upper(1.0, 100), 0.005);
  EXPECT_DOUBLE_EQ(dv::entropy_upper(0.0, 100), 0.005);
  EXPECT_NEAR(dv::entropy_upper(0.5, 100), 0.5 * std::log(2.0) + 0.005, 1e-15);
}

TEST(Entropy, LowerExamplesAndCap) {
  const EstimatorConfig cfg;
  const double m = 1000.0;
  EXPECT_EQ(dv::entropy_lower(0.0, m, cfg), 0.0);
  bool capped = false;
  for (std::int64_t c = 0; c <= 400; ++c) {
    const double v = dv::entropy_lower(c / m, m, cfg);
    EXPECT_LE(v, 1.0);
    capped = capped || v == 1.0;
  }
  EXPECT_TRUE(capped);
}

TEST(Entropy, LowerMatchesExtendedPrecision) {
  using Big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<256>>;
  const EstimatorConfig cfg;
  const double m = 1000.0;
  const int K = cfg.degree(m);
  const double delta = cfg.delta(m);
  const auto& r =
      divest::approx::best_approx(divest::approx::Target::kXLogX, K, {0.0, 1.0}).poly.coeffs;
  for (std::int64_t c = 1; c <= 30; ++c) {
    Big total = 0, prod = 1;
    const Big bd(delta);
    for (int k = 1; k <= K; ++k) {
      prod *= (Big(c) - (k - 1)) / (Big(m) * bd);
      Big h = -bd * Big(r[k]);
      if (k == 1) h -= bd * boost::multiprecision::log(bd);
      total += h * prod;
    }
    const double ref = std::min(static_cast<double>(total), 1.0);
    EXPECT_NEAR(dv::entropy_lower(c / m, m, cfg), ref, 1e-12 * (1.0 + std::abs(ref))) << c;
  }
}

TEST(KlAdaptive, AllZeroIsZero) {
  const auto est = dv::estimate_kl_adaptive(zeros(7, 100), zeros(7, 100), EstimatorConfig{});
  EXPECT_EQ(est.value, 0.0);
  EXPECT_EQ(est.regime_counts.nonsmooth, 7u);
}

TEST(KlAdaptive, ValueIsOffsetPlusPerSymbol) {
  const auto pair = divest::sampling::make_worst_case_pair(60, 2.0);
  const auto sp = divest::sampling::sample_split(pair.p, 3000, 9, 0, 0);
  const auto sq = divest::sampling::sample_split(pair.q, 3000, 9, 0, 3);
  const auto est = dv::estimate_kl_adaptive(sp, sq, EstimatorConfig{});
  ASSERT_TRUE(est.per_symbol.has_value());
  double sum = est.offset;
  for (double v : *est.per_symbol) sum += v;
  EXPECT_NEAR(est.value, sum, 1e-12);
  EXPECT_EQ(est.regime_counts.smooth + est.regime_counts.nonsmooth, 60u);
}

TEST(Estimators, PermutationInvariance) {
  const auto pair = divest::sampling::make_worst_case_pair(80, 3.0);
  const auto sp = divest::sampling::sample_split(pair.p, 2400, 21, 0, 0);
  const auto sq = divest::sampling::sample_split(pair.q, 2400, 21, 0, 3);
  std::vector<std::size_t> perm(80);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(3));
  const auto pp = permuted(sp, perm), pq = permuted(sq, perm);
  const EstimatorConfig cfg;
  EXPECT_EQ(dv::estimate_kl_adaptive(sp, sq, cfg).value, dv::estimate_kl_adaptive(pp, pq, cfg).value);
  EXPECT_EQ(dv::estimate_hellinger(sp, sq, cfg).value, dv::estimate_hellinger(pp, pq, cfg).value);
  EXPECT_EQ(dv::estimate_chi2(sp, sq, cfg).value, dv::estimate_chi2(pp, pq, cfg).value);
  const auto hp = sp.merged(), hq = sq.merged(), hpp = pp.merged(), hpq = pq.merged();
  EXPECT_EQ(dv::estimate_kl_plugin(hp, hq), dv::estimate_kl_plugin(hpp, hpq));
  EXPECT_EQ(dv::hellinger_plugin(hp, hq), dv::hellinger_plugin(hpp, hpq));
  EXPECT_EQ(dv::chi2_plugin(hp, hq), dv::chi2_plugin(hpp, hpq));
}

TEST(Estimators, UnseenSymbolContributesZero) {
  const auto pair = divest::sampling::make_worst_case_pair(40, 2.0);
  const auto sp = divest::sampling::sample_split(pair.p, 1500, 4, 0, 0);
  const auto sq = divest::sampling::sample_split(pair.q, 1500, 4, 0, 3);
  const auto up = with_unseen_symbol(sp), uq = with_unseen_symbol(sq);
  const EstimatorConfig cfg;
  const auto kl = dv::estimate_kl_adaptive(up, uq, cfg);
  EXPECT_EQ(kl.per_symbol->back(), 0.0);
  EXPECT_NEAR(kl.value, dv::estimate_kl_adaptive(sp, sq, cfg).value, 1e-15);
  const auto h = dv::estimate_hellinger(up, uq, cfg);
  EXPECT_EQ(h.per_symbol->back(), 0.0);
  EXPECT_NEAR(h.value, dv::estimate_hellinger(sp, sq, cfg).value, 1e-15);
}

TEST(Estimators, RejectBadShapes) {
  const EstimatorConfig cfg;
  try {
    dv::estimate_kl_adaptive(zeros(3, 100), zeros(4, 100), cfg);
    FAIL();
  } catch (const divest::Error& e) {
    EXPECT_EQ(e.code(), Errc::kDimensionMismatch);
  }
  try {
    dv::estimate_kl_adaptive(zeros(3, 1.5), zeros(3, 100), cfg);
    FAIL();
  } catch (const divest::Error& e) {
    EXPECT_EQ(e.code(), Errc::kRateTooSmall);
  }
  EXPECT_THROW(dv::estimate_hellinger(zeros(3, 100), zeros(2, 100), cfg), divest::Error);
  EXPECT_THROW(dv::estimate_chi2(zeros(3, 100), zeros(2, 100), cfg), divest::Error);
}

TEST(KlPlugin, Examples) {
  EXPECT_NEAR(dv::estimate_kl_plugin({{3, 1}, 4}, {{0, 4}, 4}), 0.477386, 1e-6);
  EXPECT_EQ(dv::estimate_kl_plugin({{5, 2, 9}, 16}, {{5, 2, 9}, 16}), 0.0);
  const Histogram hp{{4, 6, 10}, 20}, hq{{7, 7, 16}, 30};
  double textbook = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double p = hp.counts[i] / 20.0, q = hq.counts[i] / 30.0;
    textbook += p * std::log(p / q);
  }
  EXPECT_NEAR(dv::estimate_kl_plugin(hp, hq), textbook, 1e-15);
  try {
    dv::estimate_kl_plugin({{0, 0}, 4}, {{1, 3}, 4});
    FAIL();
  } catch (const divest::Error& e) {
    EXPECT_EQ(e.code(), Errc::kEmptyInput);
  }
  EXPECT_TRUE(std::isfinite(dv::estimate_kl_plugin({{9, 0, 1}, 10}, {{0, 0, 0}, 10})));
}

TEST(HellingerTerm, Examples) {
  const EstimatorConfig cfg;
  EXPECT_NEAR(dv::hellinger_term(0.0, 0.49, 0.5, 100, cfg), 0.7, 1e-15);
  EXPECT_EQ(dv::hellinger_term(0.0, 0.49, 0.0, 100, cfg), 0.0);
  for (std::int64_t c = 0; c <= 300; ++c) {
    const double v = dv::hellinger_term(c / 1000.0, 0.0, 0.0, 1000, cfg);
    EXPECT_LE(std::abs(v), 1.0);
  }
}

TEST(Hellinger, AllZeroIsOne) {
  EXPECT_EQ(dv::estimate_hellinger(zeros(5, 50), zeros(5, 50), EstimatorConfig{}).value, 1.0);
}

TEST(HellingerPlugin, Examples) {
  EXPECT_EQ(dv::hellinger_plugin({{2, 3}, 5}, {{2, 3}, 5}), 0.0);
  EXPECT_NEAR(dv::hellinger_plugin({{4, 0}, 4}, {{0, 7}, 7}), 1.0, 1e-15);
  EXPECT_NEAR(dv::hellinger_plugin({{4, 0}, 4}, {{3, 3}, 6}), 0.292893, 1e-6);
  EXPECT_THROW(dv::hellinger_plugin({{0, 0}, 4}, {{3, 3}, 6}), divest::Error);
}

TEST(Chi2, AllZeroIsMinusOne) {
  EXPECT_EQ(dv::estimate_chi2(zeros(5, 50), zeros(5, 50), EstimatorConfig{}).value, -1.0);
}

TEST(Chi2, NonSmoothTermsAreClamped) {
  const auto pair = divest::sampling::make_worst_case_pair(200, 3.0);
  const EstimatorConfig cfg;
  for (std::uint64_t t = 0; t < 10; ++t) {
    const auto sp = divest::sampling::sample_split(pair.p, 600, 8, t, 0);
    const auto sq = divest::sampling::sample_split(pair.q, 600, 8, t, 3);
    const auto est = dv::estimate_chi2(sp, sq, cfg);
    for (std::size_t i = 0; i < 200; ++i) {
      if (sq.parts[2].counts[i] / sq.rate < cfg.threshold(sq.rate)) {
        EXPECT_LE(std::abs((*est.per_symbol)[i]), cfg.truncate);
      }
    }
  }
}

TEST(Chi2Plugin, Examples) {
  EXPECT_NEAR(dv::chi2_plugin({{2, 3}, 5}, {{2, 3}, 5}), 0.0, 1e-15);
  EXPECT_NEAR(dv::chi2_plugin({{4, 0}, 4}, {{3, 3}, 6}), 1.0, 1e-15);
  EXPECT_TRUE(std::isfinite(dv::chi2_plugin({{4, 1}, 5}, {{0, 6}, 6})));
  EXPECT_THROW(dv::chi2_plugin({{0, 0}, 4}, {{3, 3}, 6}), divest::Error);
}

TEST(ExactFunctionals, Examples) {
  const std::vector<double> p{0.5, 0.5}, q{0.25, 0.75};
  EXPECT_NEAR(dv::kl_divergence(p, q), 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0), 1e-15);
  EXPECT_NEAR(dv::hellinger_squared(std::vector<double>{1, 0}, std::vector<double>{0, 1}), 1.0, 1e-15);
  EXPECT_NEAR(dv::chi_squared(std::vector<double>{1, 0}, std::vector<double>{0.5, 0.5}), 1.0, 1e-15);
  EXPECT_TRUE(std::isinf(dv::kl_divergence(std::vector<double>{1, 0}, std::vector<double>{0, 1})));
}

TEST(KlAdaptive, RiskDoesNotGrowWithSampleSize) {
  divest::harness::ExperimentSpec spec;
  spec.fixture = {"worst_case", 0.3};
  spec.estimators = {"kl_adaptive"};
  for (double m : {1000.0, 3000.0, 10000.0}) spec.grid.push_back({200, m, m, 3.0});
  spec.trials = 100;
  spec.seed = 17;
  const auto report = divest::harness::run_risk_experiment(spec);
  ASSERT_EQ(report.rows.size(), 3u);
  for (std::size_t i = 0; i + 1 < report.rows.size(); ++i) {
    const auto& a = report.rows[i];
    const auto& b = report.rows[i + 1];
    const double se = std::hypot(a.stderr_mse, b.stderr_mse);
    EXPECT_LE(b.mse, a.mse + 2.0 * se) << "m " << a.point.m << " -> " << b.point.m;
  }
}
