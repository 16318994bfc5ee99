#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "divest/approx.hpp"

namespace divest::approx {

/// Identity of one cached approximation record.
struct CacheKey {
  std::string target;
  int degree = 0;
  Interval domain;

  std::string filename() const;
};

/// On-disk store of approximation results, one text file per key. Domain and
/// error values use 17 significant digits; coefficients are written with
/// enough digits to round-trip a long double exactly. Writes go to a temporary file that is
/// renamed into place, so concurrent readers never observe a partial record.
class CoefficientCache {
 public:
  explicit CoefficientCache(std::filesystem::path directory);

  /// $DIVEST_CACHE_DIR if set, else $HOME/.cache/divest, else a directory
  /// under the system temporary path.
  static std::filesystem::path default_directory();

  const std::filesystem::path& directory() const noexcept { return dir_; }

  std::optional<ApproxResult> load(const CacheKey& key) const;

  /// Returns false if the record could not be written.
  bool store(const CacheKey& key, const ApproxResult& result) const;

  static std::string serialize(const CacheKey& key, const ApproxResult& result);
  /// Throws Errc::kParse on malformed input or a key mismatch.
  static ApproxResult parse(const std::string& text, const CacheKey& expected);

 private:
  std::filesystem::path dir_;
};

}  // namespace divest::approx
