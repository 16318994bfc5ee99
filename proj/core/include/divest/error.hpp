#pragma once

#include <stdexcept>
#include <string>

namespace divest {

enum class Errc {
  kInvalidDomain,
  kNonConvergence,
  kNonLatticeInput,
  kDimensionMismatch,
  kRateTooSmall,
  kEmptyInput,
  kInvalidParams,
  kUnknownEstimator,
  kUnknownFixture,
  kInsufficientRows,
  kParse,
  kIo,
};

const char* to_string(Errc code) noexcept;

/// Base exception for every failure reported by the library. The category
/// is available through code(); what() carries a human-readable diagnosis.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace divest
