#pragma once

// Monte Carlo risk evaluation of the divergence estimators on parametric
// fixtures, plus log-log rate fitting over the resulting reports.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "divest/divergence.hpp"
#include "divest/sampling.hpp"

namespace divest::harness {

enum class EstimatorId { kKlAdaptive, kKlPlugin, kHellinger, kHellingerPlugin, kChi2, kChi2Plugin };

const char* estimator_name(EstimatorId id) noexcept;
/// Throws Errc::kUnknownEstimator.
EstimatorId parse_estimator(const std::string& name);

/// Named pair generator: "uniform", "worst_case", "two_point_q1" or
/// "two_point_q0". eps is used by the two-point fixtures only.
struct Fixture {
  std::string name = "worst_case";
  double eps = 0.3;
};

/// Throws Errc::kUnknownFixture.
sampling::DistributionPair make_fixture(const Fixture& fixture, int S, double u);

/// Exact value of the functional an estimator targets.
double true_value(EstimatorId id, const sampling::DistributionPair& pair);

struct GridPoint {
  int S = 0;
  double m = 0.0;
  double n = 0.0;
  double u = 1.0;
};

struct ExperimentSpec {
  Fixture fixture;
  std::vector<std::string> estimators;
  std::vector<GridPoint> grid;
  int trials = 100;
  std::uint64_t seed = 1;
  EstimatorConfig cfg;
  /// 0 selects the hardware concurrency. The report does not depend on it.
  unsigned threads = 0;

  void validate() const;
};

struct RiskRow {
  std::string estimator;
  GridPoint point;
  double mse = 0.0;
  double bias = 0.0;
  double variance = 0.0;
  /// NaN when trials == 1.
  double stderr_mse = 0.0;
  int trials = 0;
};

struct RiskReport {
  std::vector<RiskRow> rows;
};

/// Rows are ordered by grid point, then by estimator as listed in the spec.
RiskReport run_risk_experiment(const ExperimentSpec& spec);

enum class Axis { kS, kM, kN };
Axis parse_axis(const std::string& name);

struct RateFit {
  double slope = 0.0;
  double r2 = 0.0;
};

/// Least-squares slope of log(mse) against log(axis) over the estimator's
/// rows. Throws Errc::kInsufficientRows with fewer than three rows and
/// Errc::kInvalidParams when another axis varies.
RateFit rate_fit(const RiskReport& report, const std::string& estimator, Axis axis);

void write_csv(std::ostream& out, const RiskReport& report);

/// `key = value` lines with `#` comments; see README for the keys.
ExperimentSpec parse_spec(std::istream& in);
ExperimentSpec load_spec(const std::filesystem::path& path);

}  // namespace divest::harness
