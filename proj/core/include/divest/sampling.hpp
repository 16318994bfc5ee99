#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <utility>
#include <vector>

#include "divest/histogram.hpp"

namespace divest::sampling {

struct DiscreteDistribution {
  std::vector<double> probs;

  /// Throws Errc::kInvalidParams unless probs are nonnegative and sum to 1
  /// within 1e-12.
  static DiscreteDistribution checked(std::vector<double> probs);

  std::size_t size() const noexcept { return probs.size(); }
};

/// P and Q of one dimension with p_i <= u_bound * q_i.
struct DistributionPair {
  DiscreteDistribution p;
  DiscreteDistribution q;
  double u_bound = 1.0;

  void validate() const;
};

/// Counter-based 64-bit generator. The stream is a pure function of the key
/// (seed, trial, symbol, part) and the draw index, so any subset of streams
/// can be regenerated independently and in any order.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t trial, std::uint64_t symbol,
             std::uint64_t part) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// counts[i] ~ Poi(rate * probs[i]), independent; `stream` selects the part
/// slot of the RNG key so several histograms can share a (seed, trial).
Histogram sample_poisson_histogram(const DiscreteDistribution& d, double rate, std::uint64_t seed,
                                   std::uint64_t trial = 0, std::uint64_t stream = 0);

/// Uniform trisection of every count by binomial thinning. The parts sum to
/// the input exactly; the per-part rate is h.rate / 3.
SplitSamples split3(const Histogram& h, std::uint64_t seed);

/// Draws the three parts directly as independent Poi(rate * p / 3) (equal in
/// law to sampling at `rate` and thinning). Parts use streams
/// first_stream .. first_stream + 2.
SplitSamples sample_split(const DiscreteDistribution& d, double rate, std::uint64_t seed,
                          std::uint64_t trial, std::uint64_t first_stream = 0);

/// P uniform on S symbols; Q = (1/(Su), ..., 1/(Su), 1 - (S-1)/(Su)).
DistributionPair make_worst_case_pair(int S, double u);

/// P = Q = uniform on S symbols.
DistributionPair make_uniform_pair(int S);

/// ((P, Q1), (P, Q0)) with P = (1/(2(S-1)), ..., 1/2), Q1 flat at 1/((S-1)u) on
/// the first S-1 symbols and Q0 perturbing those masses by alternating
/// factors (1 +- eps).
std::pair<DistributionPair, DistributionPair> make_two_point_pair(int S, double u, double eps);

/// Text format: `symbol_index probability` per line, `#` comments. Missing
/// indices are zero; the result is validated.
DiscreteDistribution parse_distribution(std::istream& in);
DiscreteDistribution load_distribution(const std::filesystem::path& path);

}  // namespace divest::sampling
