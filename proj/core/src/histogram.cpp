#include "divest/histogram.hpp"

#include <cmath>

#include "divest/error.hpp"

namespace divest {

std::int64_t Histogram::total() const noexcept {
  std::int64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

void Histogram::validate() const {
  if (!(rate >= 1.0) || !std::isfinite(rate)) {
    throw Error(Errc::kInvalidParams, "histogram rate must be >= 1");
  }
  for (auto c : counts) {
    if (c < 0) throw Error(Errc::kInvalidParams, "histogram counts must be nonnegative");
  }
}

Histogram SplitSamples::merged() const {
  Histogram h;
  h.rate = 3.0 * rate;
  h.counts.assign(dimension(), 0);
  for (const auto& part : parts) {
    for (std::size_t i = 0; i < h.counts.size(); ++i) h.counts[i] += part.counts[i];
  }
  return h;
}

void SplitSamples::validate() const {
  if (!(rate >= 1.0) || !std::isfinite(rate)) {
    throw Error(Errc::kInvalidParams, "split rate must be >= 1");
  }
  for (const auto& part : parts) {
    part.validate();
    if (part.size() != parts[0].size()) {
      throw Error(Errc::kDimensionMismatch, "split parts differ in dimension");
    }
  }
}

}  // namespace divest
