#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace divest {

/// Observed symbol counts with the nominal Poisson rate they were drawn at.
struct Histogram {
  std::vector<std::int64_t> counts;
  double rate = 1.0;

  std::size_t size() const noexcept { return counts.size(); }
  std::int64_t total() const noexcept;
  /// Throws Errc::kInvalidParams on rate < 1 or a negative count.
  void validate() const;
};

/// Three independent sub-histograms of one sample, each at the per-part rate.
struct SplitSamples {
  std::array<Histogram, 3> parts;
  double rate = 1.0;

  std::size_t dimension() const noexcept { return parts[0].size(); }
  /// Part-wise sum; equal in law to the unsplit Poissonized histogram.
  Histogram merged() const;
  void validate() const;
};

}  // namespace divest
