#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "divest/numeric.hpp"

namespace num = divest::numeric;

TEST(Numeric, TwoSumIsErrorFree) {
  double s = 0, e = 0;
  num::two_sum(1.0, 1e-20, s, e);
  EXPECT_EQ(s, 1.0);
  EXPECT_EQ(e, 1e-20);
  num::two_sum(0.1, 0.2, s, e);
  EXPECT_EQ(static_cast<long double>(s) + e, static_cast<long double>(0.1) + static_cast<long double>(0.2));
}

TEST(Numeric, TwoProdRecoversRoundingError) {
  const double a = 1.0 + std::ldexp(1.0, -30), b = 1.0 - std::ldexp(1.0, -30);
  double p = 0, e = 0;
  num::two_prod(a, b, p, e);
  EXPECT_EQ(p, 1.0);
  EXPECT_EQ(e, -std::ldexp(1.0, -60));
}

TEST(Numeric, CompensatedSumSurvivesCancellation) {
  num::CompensatedSum<double> sum;
  sum.add(1e16);
  for (int i = 0; i < 1000; ++i) sum.add(1.0);
  sum.add(-1e16);
  EXPECT_EQ(sum.value(), 1000.0);
}

TEST(Numeric, PairwiseSumDependsOnlyOnOrder) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(4097);
  for (auto& x : v) x = dist(gen);
  const double a = num::pairwise_sum(v);
  const double b = num::pairwise_sum(std::vector<double>(v));
  EXPECT_EQ(a, b);
  long double ref = 0.0L;
  for (double x : v) ref += x;
  EXPECT_NEAR(a, static_cast<double>(ref), 1e-12);
  EXPECT_EQ(num::pairwise_sum({}), 0.0);
}

TEST(Numeric, CompensatedHornerOnIllConditionedPolynomial) {
  // (x - 1)^7 expanded; near x = 1 naive Horner loses every digit.
  const std::vector<long double> c{-1, 7, -21, 35, -35, 21, -7, 1};
  const long double x = 1.0L + 1.0L / 1024;
  const long double exact = std::pow(1.0L / 1024, 7);
  const long double got = num::compensated_horner(c, x);
  EXPECT_NEAR(static_cast<double>(got / exact), 1.0, 1e-9);
}
