#pragma once

// Divergence estimators from Poissonized, three-way split histograms, and the
// plug-in baselines.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "divest/histogram.hpp"

namespace divest {

/// Tuning constants shared by the polynomial-approximation estimators.
/// Thresholds are c1 ln n / n, approximation intervals [0, 2 c1 ln n / n] and
/// degrees max(min_degree, round(c2 ln n)) for a (per-part) rate n.
struct EstimatorConfig {
  double c1 = 3.5;
  double c2 = 2.5;
  double truncate = 1.0;
  int min_degree = 2;
  /// Use (p1 + p2) / 2 instead of p1 as the multiplier of the smooth KL term.
  bool average_p_in_smooth = false;

  void validate() const;
  int degree(double rate) const;
  double threshold(double rate) const;
  double delta(double rate) const;
};

enum class Regime { kSmooth, kNonSmooth };

struct RegimeCounts {
  std::size_t smooth = 0;
  std::size_t nonsmooth = 0;
};

/// value == offset + sum(per_symbol) when per_symbol is present.
struct DivergenceEstimate {
  double value = 0.0;
  std::optional<std::vector<double>> per_symbol;
  double offset = 0.0;
  /// Tally of the q-side regime decisions.
  RegimeCounts regime_counts;
};

namespace divergence {

/// NonSmooth iff qhat3 <= c1 ln n / n.
Regime classify_regime(double qhat3, double n, double c1) noexcept;

/// p1 * T3(q1, q2): order-3 bias-corrected plug-in of p ln q. Zero when q1 == 0.
double kl_smooth_term(double phat1, double qhat1, double qhat2, double n) noexcept;

/// phat1 times the unbiased estimate of the ln q surrogate built from the best
/// approximation of x ln x on [0, 2 c1 ln n / n], clamped to +-truncate.
double kl_nonsmooth_term(double phat1, double qhat1, double n, const EstimatorConfig& cfg);

/// -x ln x + 1/(2m).
double entropy_upper(double phat1, double m) noexcept;

/// Unbiased estimate of the best approximation of -x ln x on [0, 2 c1 ln m / m]
/// with the constant term dropped, capped at 1.
double entropy_lower(double phat1, double m, const EstimatorConfig& cfg);

DivergenceEstimate estimate_kl_adaptive(const SplitSamples& sp, const SplitSamples& sq,
                                        const EstimatorConfig& cfg);

/// D(P_m || Q_n') with q floored at 1/n.
double estimate_kl_plugin(const Histogram& hp, const Histogram& hq);

double hellinger_term(double xhat1, double xhat2, double xhat3, double l,
                      const EstimatorConfig& cfg);

DivergenceEstimate estimate_hellinger(const SplitSamples& sp, const SplitSamples& sq,
                                      const EstimatorConfig& cfg);

double hellinger_plugin(const Histogram& hp, const Histogram& hq);

/// p1 (p1 - 1/m) * T3(q1, q2) for 1/q. Zero when q1 == 0.
double chi2_smooth_term(double phat1, double qhat1, double qhat2, double m, double n) noexcept;

DivergenceEstimate estimate_chi2(const SplitSamples& sp, const SplitSamples& sq,
                                 const EstimatorConfig& cfg);

double chi2_plugin(const Histogram& hp, const Histogram& hq);

// Exact functionals of known distributions.
double kl_divergence(std::span<const double> p, std::span<const double> q);
double hellinger_squared(std::span<const double> p, std::span<const double> q);
double chi_squared(std::span<const double> p, std::span<const double> q);

}  // namespace divergence
}  // namespace divest
