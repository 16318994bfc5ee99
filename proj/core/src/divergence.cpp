#include "divest/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "divest/approx.hpp"
#include "divest/error.hpp"
#include "divest/numeric.hpp"
#include "divest/unbiased.hpp"

namespace divest {

using unbiased::LatticePoint;
using unbiased::ScaledPolyEstimator;

void EstimatorConfig::validate() const {
  if (!(c1 > 0.0) || !(c2 > 0.0) || !(truncate > 0.0)) {
    throw Error(Errc::kInvalidParams, "c1, c2 and truncate must be > 0");
  }
  if (min_degree < 1) throw Error(Errc::kInvalidParams, "min_degree must be >= 1");
}

int EstimatorConfig::degree(double rate) const {
  return std::max(min_degree, static_cast<int>(std::lround(c2 * std::log(rate))));
}

double EstimatorConfig::threshold(double rate) const { return c1 * std::log(rate) / rate; }

double EstimatorConfig::delta(double rate) const { return 2.0 * c1 * std::log(rate) / rate; }

namespace divergence {

namespace {

void check_rate(double rate) {
  if (!(rate >= 2.0)) {
    throw Error(Errc::kRateTooSmall,
                "per-part rate " + std::to_string(rate) + " is below 2; ln(rate) must be positive");
  }
}

void check_pair(const SplitSamples& sp, const SplitSamples& sq, const EstimatorConfig& cfg) {
  cfg.validate();
  sp.validate();
  sq.validate();
  if (sp.dimension() != sq.dimension()) {
    throw Error(Errc::kDimensionMismatch, "P has " + std::to_string(sp.dimension()) +
                                              " symbols, Q has " + std::to_string(sq.dimension()));
  }
  check_rate(sp.rate);
  check_rate(sq.rate);
}

double clamp_sym(double v, double bound) noexcept { return std::clamp(v, -bound, bound); }

double xlogx(double x) noexcept { return x > 0.0 ? x * std::log(x) : 0.0; }

// g_{K,k+1}, k = 0..K, against (q / Delta_n)^k.
ScaledPolyEstimator kl_nonsmooth_estimator(double n, const EstimatorConfig& cfg) {
  const int K = cfg.degree(n);
  const double delta = cfg.delta(n);
  const auto& r = approx::xlogx_coeffs(K).poly.coeffs;
  std::vector<long double> base(r.begin() + 1, r.begin() + K + 2);
  base[0] += std::log(static_cast<long double>(delta));
  return ScaledPolyEstimator(std::move(base), n, delta);
}

// -x ln x on [0, Delta_m] from the [0, 1] approximation of x ln x:
// -x ln x = -Delta y ln y - Delta ln(Delta) y with y = x / Delta.
ScaledPolyEstimator entropy_lower_estimator(double m, const EstimatorConfig& cfg) {
  const int K = cfg.degree(m);
  const double delta = cfg.delta(m);
  const auto& r = approx::best_approx(approx::Target::kXLogX, K, approx::Interval{0.0, 1.0}).poly.coeffs;
  const long double d = delta;
  std::vector<long double> base(K + 1, 0.0L);
  for (int k = 1; k <= K; ++k) base[k] = -d * r[k];
  base[1] -= d * std::log(d);
  return ScaledPolyEstimator(std::move(base), m, delta);
}

// R_l: sum_{k>=1} a_{K,k} Delta^{1/2} ((x - j/l) / Delta products).
ScaledPolyEstimator hellinger_estimator(double l, const EstimatorConfig& cfg) {
  const int K = cfg.degree(l);
  const double delta = cfg.delta(l);
  const auto& a = approx::sqrt_coeffs(K).poly.coeffs;
  const long double root = std::sqrt(static_cast<long double>(delta));
  std::vector<long double> base(K + 1, 0.0L);
  for (int k = 1; k <= K; ++k) base[k] = a[k] * root;
  return ScaledPolyEstimator(std::move(base), l, delta);
}

// Q_K(q) = (1/Delta) sum_j c_j (q/Delta)^j.
ScaledPolyEstimator chi2_estimator(double n, const EstimatorConfig& cfg) {
  const int K = cfg.degree(n);
  const double delta = cfg.delta(n);
  const auto c = approx::cheb_inverse_normalized(K);
  std::vector<long double> base(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) base[j] = c[j] / delta;
  return ScaledPolyEstimator(std::move(base), n, delta);
}

DivergenceEstimate finish(std::vector<double> per_symbol, double offset, RegimeCounts counts) {
  DivergenceEstimate out;
  out.offset = offset;
  out.value = offset + numeric::symmetric_sum(per_symbol);
  out.per_symbol = std::move(per_symbol);
  out.regime_counts = counts;
  return out;
}

}  // namespace

Regime classify_regime(double qhat3, double n, double c1) noexcept {
  return qhat3 <= c1 * std::log(n) / n ? Regime::kNonSmooth : Regime::kSmooth;
}

double kl_smooth_term(double phat1, double qhat1, double qhat2, double n) noexcept {
  if (qhat1 == 0.0) return 0.0;
  const double q1 = qhat1, q2 = qhat2, d = q2 - q1;
  const double q1sq = q1 * q1, q1cu = q1sq * q1;
  const double t3 = std::log(q1) + d / q1 - d * d / (2.0 * q1sq) + 3.0 * q2 / (2.0 * n * q1sq) +
                    d * d * d / (3.0 * q1cu) - q2 * q2 / (n * q1cu) +
                    2.0 * q2 / (3.0 * n * n * q1cu);
  return phat1 * t3;
}

double kl_nonsmooth_term(double phat1, double qhat1, double n, const EstimatorConfig& cfg) {
  cfg.validate();
  check_rate(n);
  const auto q = LatticePoint::from_value(qhat1, n);
  if (phat1 == 0.0) return 0.0;
  return clamp_sym(phat1 * kl_nonsmooth_estimator(n, cfg).evaluate(q.count), cfg.truncate);
}

double entropy_upper(double phat1, double m) noexcept { return -xlogx(phat1) + 1.0 / (2.0 * m); }

double entropy_lower(double phat1, double m, const EstimatorConfig& cfg) {
  cfg.validate();
  check_rate(m);
  const auto p = LatticePoint::from_value(phat1, m);
  return std::min(entropy_lower_estimator(m, cfg).evaluate(p.count), 1.0);
}

DivergenceEstimate estimate_kl_adaptive(const SplitSamples& sp, const SplitSamples& sq,
                                        const EstimatorConfig& cfg) {
  check_pair(sp, sq, cfg);
  const double m = sp.rate, n = sq.rate;
  const ScaledPolyEstimator lower = entropy_lower_estimator(m, cfg);
  const ScaledPolyEstimator cross = kl_nonsmooth_estimator(n, cfg);
  const double thr_m = cfg.threshold(m), thr_n = cfg.threshold(n);

  const std::size_t S = sp.dimension();
  std::vector<double> per_symbol(S);
  RegimeCounts counts;
  for (std::size_t i = 0; i < S; ++i) {
    const std::int64_t xp1 = sp.parts[0].counts[i], xq1 = sq.parts[0].counts[i];
    const double p1 = xp1 / m, p2 = sp.parts[1].counts[i] / m, p3 = sp.parts[2].counts[i] / m;
    const double q1 = xq1 / n, q2 = sq.parts[1].counts[i] / n, q3 = sq.parts[2].counts[i] / n;

    const double entropy = p3 <= thr_m ? std::min(lower.evaluate(xp1), 1.0) : entropy_upper(p1, m);
    double cross_term;
    if (q3 <= thr_n) {
      ++counts.nonsmooth;
      cross_term = p1 == 0.0 ? 0.0 : clamp_sym(p1 * cross.evaluate(xq1), cfg.truncate);
    } else {
      ++counts.smooth;
      const double pmult = cfg.average_p_in_smooth ? 0.5 * (p1 + p2) : p1;
      cross_term = kl_smooth_term(pmult, q1, q2, n);
    }
    per_symbol[i] = -(entropy + cross_term);
  }
  return finish(std::move(per_symbol), 0.0, counts);
}

double estimate_kl_plugin(const Histogram& hp, const Histogram& hq) {
  hp.validate();
  hq.validate();
  if (hp.size() != hq.size()) throw Error(Errc::kDimensionMismatch, "P and Q differ in dimension");
  const std::int64_t total = hp.total();
  if (total == 0) throw Error(Errc::kEmptyInput, "EmptyP: P histogram has no counts");
  const double n = hq.rate;
  std::vector<double> terms(hp.size(), 0.0);
  for (std::size_t i = 0; i < hp.size(); ++i) {
    if (hp.counts[i] == 0) continue;
    const double p = static_cast<double>(hp.counts[i]) / static_cast<double>(total);
    const double q = std::max(hq.counts[i] / n, 1.0 / n);
    terms[i] = p * std::log(p / q);
  }
  return numeric::symmetric_sum(std::move(terms));
}

double hellinger_term(double xhat1, double xhat2, double xhat3, double l,
                      const EstimatorConfig& cfg) {
  cfg.validate();
  check_rate(l);
  if (xhat3 >= cfg.threshold(l)) return std::sqrt(xhat2);
  const auto x = LatticePoint::from_value(xhat1, l);
  return clamp_sym(hellinger_estimator(l, cfg).evaluate(x.count), 1.0);
}

DivergenceEstimate estimate_hellinger(const SplitSamples& sp, const SplitSamples& sq,
                                      const EstimatorConfig& cfg) {
  check_pair(sp, sq, cfg);
  const double m = sp.rate, n = sq.rate;
  const ScaledPolyEstimator rm = hellinger_estimator(m, cfg);
  const ScaledPolyEstimator rn = hellinger_estimator(n, cfg);
  const double thr_m = cfg.threshold(m), thr_n = cfg.threshold(n);

  auto side = [](const SplitSamples& s, std::size_t i, double rate, double thr,
                 const ScaledPolyEstimator& r, bool& smooth) {
    smooth = s.parts[2].counts[i] / rate >= thr;
    if (smooth) return std::sqrt(s.parts[1].counts[i] / rate);
    return clamp_sym(r.evaluate(s.parts[0].counts[i]), 1.0);
  };

  const std::size_t S = sp.dimension();
  std::vector<double> per_symbol(S);
  RegimeCounts counts;
  for (std::size_t i = 0; i < S; ++i) {
    bool p_smooth = false, q_smooth = false;
    const double tp = side(sp, i, m, thr_m, rm, p_smooth);
    const double tq = side(sq, i, n, thr_n, rn, q_smooth);
    ++(q_smooth ? counts.smooth : counts.nonsmooth);
    per_symbol[i] = -(tp * tq);
  }
  return finish(std::move(per_symbol), 1.0, counts);
}

double hellinger_plugin(const Histogram& hp, const Histogram& hq) {
  hp.validate();
  hq.validate();
  if (hp.size() != hq.size()) throw Error(Errc::kDimensionMismatch, "P and Q differ in dimension");
  const std::int64_t tp = hp.total(), tq = hq.total();
  if (tp == 0 || tq == 0) throw Error(Errc::kEmptyInput, "both histograms need counts");
  std::vector<double> terms(hp.size());
  for (std::size_t i = 0; i < hp.size(); ++i) {
    const double d = std::sqrt(static_cast<double>(hp.counts[i]) / tp) -
                     std::sqrt(static_cast<double>(hq.counts[i]) / tq);
    terms[i] = d * d;
  }
  return 0.5 * numeric::symmetric_sum(std::move(terms));
}

double chi2_smooth_term(double phat1, double qhat1, double qhat2, double m, double n) noexcept {
  if (qhat1 == 0.0) return 0.0;
  const double q1 = qhat1, q2 = qhat2, d = q2 - q1;
  const double q1sq = q1 * q1, q1cu = q1sq * q1, q1qu = q1cu * q1;
  const double t3 = 1.0 / q1 - d / q1sq + d * d / q1cu - 4.0 * q2 / (n * q1cu) -
                    d * d * d / q1qu + 3.0 * q2 * q2 / (n * q1qu) - 2.0 * q2 / (n * n * q1qu);
  return phat1 * (phat1 - 1.0 / m) * t3;
}

DivergenceEstimate estimate_chi2(const SplitSamples& sp, const SplitSamples& sq,
                                 const EstimatorConfig& cfg) {
  check_pair(sp, sq, cfg);
  const double m = sp.rate, n = sq.rate;
  const ScaledPolyEstimator qk = chi2_estimator(n, cfg);
  const double thr_n = cfg.threshold(n);

  const std::size_t S = sp.dimension();
  std::vector<double> per_symbol(S);
  RegimeCounts counts;
  for (std::size_t i = 0; i < S; ++i) {
    const std::int64_t xq1 = sq.parts[0].counts[i];
    const double p1 = sp.parts[0].counts[i] / m;
    const double q1 = xq1 / n, q2 = sq.parts[1].counts[i] / n, q3 = sq.parts[2].counts[i] / n;
    if (q3 >= thr_n) {
      ++counts.smooth;
      per_symbol[i] = chi2_smooth_term(p1, q1, q2, m, n);
    } else {
      ++counts.nonsmooth;
      const double p2hat = p1 * (p1 - 1.0 / m);
      per_symbol[i] = p2hat == 0.0 ? 0.0 : clamp_sym(p2hat * qk.evaluate(xq1), cfg.truncate);
    }
  }
  return finish(std::move(per_symbol), -1.0, counts);
}

double chi2_plugin(const Histogram& hp, const Histogram& hq) {
  hp.validate();
  hq.validate();
  if (hp.size() != hq.size()) throw Error(Errc::kDimensionMismatch, "P and Q differ in dimension");
  const std::int64_t total = hp.total();
  if (total == 0) throw Error(Errc::kEmptyInput, "P histogram has no counts");
  const double n = hq.rate;
  std::vector<double> terms(hp.size(), 0.0);
  for (std::size_t i = 0; i < hp.size(); ++i) {
    if (hp.counts[i] == 0) continue;
    const double p = static_cast<double>(hp.counts[i]) / static_cast<double>(total);
    terms[i] = p * p / std::max(hq.counts[i] / n, 1.0 / n);
  }
  return numeric::symmetric_sum(std::move(terms)) - 1.0;
}

namespace {

void check_distributions(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error(Errc::kDimensionMismatch, "P and Q differ in dimension");
}

}  // namespace

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  check_distributions(p, q);
  std::vector<double> terms(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return INFINITY;
    terms[i] = p[i] * std::log(p[i] / q[i]);
  }
  return numeric::symmetric_sum(std::move(terms));
}

double hellinger_squared(std::span<const double> p, std::span<const double> q) {
  check_distributions(p, q);
  std::vector<double> terms(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
    terms[i] = d * d;
  }
  return 0.5 * numeric::symmetric_sum(std::move(terms));
}

double chi_squared(std::span<const double> p, std::span<const double> q) {
  check_distributions(p, q);
  std::vector<double> terms(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return INFINITY;
    terms[i] = p[i] * p[i] / q[i];
  }
  return numeric::symmetric_sum(std::move(terms)) - 1.0;
}

}  // namespace divergence
}  // namespace divest
