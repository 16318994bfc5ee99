#include "divest/sampling.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "divest/error.hpp"

namespace divest::sampling {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::int64_t poisson_draw(double mean, CounterRng& rng) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<std::int64_t> dist(mean);
  return dist(rng);
}

}  // namespace

DiscreteDistribution DiscreteDistribution::checked(std::vector<double> probs) {
  if (probs.empty()) throw Error(Errc::kInvalidParams, "distribution has no symbols");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw Error(Errc::kInvalidParams, "probabilities must be finite and nonnegative");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "probabilities sum to " << total << ", expected 1";
    throw Error(Errc::kInvalidParams, msg.str());
  }
  return DiscreteDistribution{std::move(probs)};
}

void DistributionPair::validate() const {
  if (p.size() != q.size()) throw Error(Errc::kDimensionMismatch, "P and Q differ in dimension");
  if (!(u_bound >= 1.0)) throw Error(Errc::kInvalidParams, "likelihood-ratio bound must be >= 1");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.probs[i] > u_bound * q.probs[i] * (1.0 + 1e-12)) {
      throw Error(Errc::kInvalidParams,
                  "p_i / q_i exceeds the likelihood-ratio bound at symbol " + std::to_string(i));
    }
  }
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t trial, std::uint64_t symbol,
                       std::uint64_t part) noexcept {
  std::uint64_t k = mix64(seed + kGolden);
  k = mix64(k ^ (trial + kGolden));
  k = mix64(k ^ (symbol * 4 + part + kGolden));
  key_ = k;
}

CounterRng::result_type CounterRng::operator()() noexcept {
  return mix64(key_ + (++counter_) * kGolden);
}

Histogram sample_poisson_histogram(const DiscreteDistribution& d, double rate, std::uint64_t seed,
                                   std::uint64_t trial, std::uint64_t stream) {
  if (!(rate >= 1.0)) throw Error(Errc::kInvalidParams, "sampling rate must be >= 1");
  Histogram h;
  h.rate = rate;
  h.counts.resize(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    CounterRng rng(seed, trial, i, stream);
    h.counts[i] = poisson_draw(rate * d.probs[i], rng);
  }
  return h;
}

SplitSamples split3(const Histogram& h, std::uint64_t seed) {
  h.validate();
  SplitSamples out;
  out.rate = h.rate / 3.0;
  for (auto& part : out.parts) {
    part.rate = out.rate;
    part.counts.assign(h.size(), 0);
  }
  for (std::size_t i = 0; i < h.size(); ++i) {
    const std::int64_t c = h.counts[i];
    if (c == 0) continue;
    CounterRng rng(seed, 0, i, 0);
    const std::int64_t first = std::binomial_distribution<std::int64_t>(c, 1.0 / 3.0)(rng);
    const std::int64_t second = std::binomial_distribution<std::int64_t>(c - first, 0.5)(rng);
    out.parts[0].counts[i] = first;
    out.parts[1].counts[i] = second;
    out.parts[2].counts[i] = c - first - second;
  }
  return out;
}

SplitSamples sample_split(const DiscreteDistribution& d, double rate, std::uint64_t seed,
                          std::uint64_t trial, std::uint64_t first_stream) {
  if (!(rate >= 3.0)) throw Error(Errc::kInvalidParams, "split sampling needs rate >= 3");
  SplitSamples out;
  out.rate = rate / 3.0;
  for (std::uint64_t k = 0; k < 3; ++k) {
    out.parts[k] = sample_poisson_histogram(d, out.rate, seed, trial, first_stream + k);
  }
  return out;
}

DistributionPair make_worst_case_pair(int S, double u) {
  if (S < 2 || !(u > 1.0) || !std::isfinite(u)) {
    throw Error(Errc::kInvalidParams, "worst-case pair needs S >= 2 and u > 1");
  }
  const double tail = static_cast<double>(S - 1) / (S * u);
  if (!(tail < 1.0)) throw Error(Errc::kInvalidParams, "(S-1)/(S u) must be < 1");
  std::vector<double> p(S, 1.0 / S);
  std::vector<double> q(S, 1.0 / (S * u));
  q.back() = 1.0 - tail;
  DistributionPair out{DiscreteDistribution::checked(std::move(p)),
                       DiscreteDistribution::checked(std::move(q)), u};
  out.validate();
  return out;
}

DistributionPair make_uniform_pair(int S) {
  if (S < 1) throw Error(Errc::kInvalidParams, "uniform pair needs S >= 1");
  std::vector<double> p(S, 1.0 / S);
  auto d = DiscreteDistribution::checked(std::move(p));
  return DistributionPair{d, d, 1.0};
}

std::pair<DistributionPair, DistributionPair> make_two_point_pair(int S, double u, double eps) {
  if (S < 3 || S % 2 == 0) throw Error(Errc::kInvalidParams, "two-point pair needs odd S >= 3");
  if (!(u > 1.0) || !std::isfinite(u)) throw Error(Errc::kInvalidParams, "two-point pair needs u > 1");
  if (!(eps > 0.0 && eps < 0.5)) throw Error(Errc::kInvalidParams, "eps must lie in (0, 1/2)");
  const double base = 1.0 / ((S - 1) * u);
  std::vector<double> p(S, 1.0 / (2.0 * (S - 1)));
  p.back() = 0.5;
  std::vector<double> q1(S, base), q0(S);
  q1.back() = 1.0 - 1.0 / u;
  for (int i = 0; i + 1 < S; ++i) q0[i] = base * (i % 2 == 0 ? 1.0 + eps : 1.0 - eps);
  q0.back() = q1.back();
  auto pd = DiscreteDistribution::checked(std::move(p));
  DistributionPair a{pd, DiscreteDistribution::checked(std::move(q1)), u};
  DistributionPair b{pd, DiscreteDistribution::checked(std::move(q0)), u};
  a.validate();
  b.validate();
  return {std::move(a), std::move(b)};
}

DiscreteDistribution parse_distribution(std::istream& in) {
  std::vector<double> probs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    long long index = 0;
    double prob = 0.0;
    if (!(ls >> index)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw Error(Errc::kParse, "line " + std::to_string(lineno) + ": expected `symbol_index probability`");
    }
    std::string rest;
    if (!(ls >> prob) || (ls >> rest) || index < 0) {
      throw Error(Errc::kParse, "line " + std::to_string(lineno) + ": expected `symbol_index probability`");
    }
    if (static_cast<std::size_t>(index) >= probs.size()) probs.resize(index + 1, 0.0);
    probs[index] += prob;
  }
  return DiscreteDistribution::checked(std::move(probs));
}

DiscreteDistribution load_distribution(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, "cannot open " + path.string());
  return parse_distribution(in);
}

}  // namespace divest::sampling
