#include "divest/error.hpp"

namespace divest {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::kInvalidDomain: return "InvalidDomain";
    case Errc::kNonConvergence: return "NonConvergence";
    case Errc::kNonLatticeInput: return "NonLatticeInput";
    case Errc::kDimensionMismatch: return "DimensionMismatch";
    case Errc::kRateTooSmall: return "RateTooSmall";
    case Errc::kEmptyInput: return "EmptyInput";
    case Errc::kInvalidParams: return "InvalidParams";
    case Errc::kUnknownEstimator: return "UnknownEstimator";
    case Errc::kUnknownFixture: return "UnknownFixture";
    case Errc::kInsufficientRows: return "InsufficientRows";
    case Errc::kParse: return "Parse";
    case Errc::kIo: return "Io";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace divest
