#include "divest/coefficient_cache.hpp"

#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>
#include <thread>

namespace divest::approx {

namespace fs = std::filesystem;

namespace {

constexpr int kFormatVersion = 2;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_coeff(long double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*Lg", std::numeric_limits<long double>::max_digits10, v);
  return buf;
}

long double parse_long_double(const std::string& s) {
  char* end = nullptr;
  const long double v = std::strtold(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw Error(Errc::kParse, "bad number '" + s + "'");
  return v;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw Error(Errc::kParse, "bad number '" + s + "'");
  return v;
}

}  // namespace

std::string CacheKey::filename() const {
  return target + "-K" + std::to_string(degree) + "-" + fmt17(domain.lo) + "-" + fmt17(domain.hi) +
         ".txt";
}

CoefficientCache::CoefficientCache(fs::path directory) : dir_(std::move(directory)) {}

fs::path CoefficientCache::default_directory() {
  if (const char* env = std::getenv("DIVEST_CACHE_DIR"); env != nullptr && *env != '\0') {
    return fs::path(env);
  }
  if (const char* home = std::getenv("HOME"); home != nullptr && *home != '\0') {
    return fs::path(home) / ".cache" / "divest";
  }
  std::error_code ec;
  return fs::temp_directory_path(ec) / "divest-cache";
}

std::string CoefficientCache::serialize(const CacheKey& key, const ApproxResult& result) {
  std::ostringstream out;
  out << "# divest approximation record\n";
  out << "format " << kFormatVersion << "\n";
  out << "target " << key.target << "\n";
  out << "degree " << key.degree << "\n";
  out << "lo " << fmt17(key.domain.lo) << "\n";
  out << "hi " << fmt17(key.domain.hi) << "\n";
  out << "iterations " << result.iterations << "\n";
  out << "error " << fmt17(result.levelled_error) << "\n";
  for (double p : result.equioscillation_points) out << "point " << fmt17(p) << "\n";
  for (std::size_t k = 0; k < result.poly.coeffs.size(); ++k) {
    out << "coeff " << k << " " << fmt_coeff(result.poly.coeffs[k]) << "\n";
  }
  return out.str();
}

ApproxResult CoefficientCache::parse(const std::string& text, const CacheKey& expected) {
  std::istringstream in(text);
  std::string line;
  ApproxResult r;
  r.poly.domain = expected.domain;
  CacheKey seen;
  bool has_error = false;
  int format = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string field;
    ls >> field;
    if (field == "format") {
      ls >> format;
    } else if (field == "target") {
      ls >> seen.target;
    } else if (field == "degree") {
      ls >> seen.degree;
    } else if (field == "lo" || field == "hi" || field == "error" || field == "point") {
      std::string v;
      ls >> v;
      const double d = parse_double(v);
      if (field == "lo") seen.domain.lo = d;
      if (field == "hi") seen.domain.hi = d;
      if (field == "error") {
        r.levelled_error = d;
        has_error = true;
      }
      if (field == "point") r.equioscillation_points.push_back(d);
    } else if (field == "iterations") {
      ls >> r.iterations;
    } else if (field == "coeff") {
      std::size_t k = 0;
      std::string v;
      ls >> k >> v;
      if (k != r.poly.coeffs.size()) throw Error(Errc::kParse, "coefficients out of order");
      r.poly.coeffs.push_back(parse_long_double(v));
    } else {
      throw Error(Errc::kParse, "unknown cache field '" + field + "'");
    }
  }
  if (format != kFormatVersion) throw Error(Errc::kParse, "unsupported cache record format");
  if (seen.target != expected.target || seen.degree != expected.degree ||
      seen.domain != expected.domain) {
    throw Error(Errc::kParse, "cache record does not match key " + expected.filename());
  }
  if (!has_error || r.poly.coeffs.size() != static_cast<std::size_t>(expected.degree) + 1) {
    throw Error(Errc::kParse, "incomplete cache record " + expected.filename());
  }
  return r;
}

std::optional<ApproxResult> CoefficientCache::load(const CacheKey& key) const {
  std::ifstream in(dir_ / key.filename());
  if (!in) return std::nullopt;
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str(), key);
  } catch (const Error&) {
    return std::nullopt;  // stale or foreign file; recomputed and overwritten
  }
}

bool CoefficientCache::store(const CacheKey& key, const ApproxResult& result) const {
  static std::atomic<unsigned> counter{0};
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) return false;
  const fs::path final_path = dir_ / key.filename();
  const fs::path tmp = dir_ / (key.filename() + ".tmp." + std::to_string(::getpid()) + "." +
                               std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) +
                               "." + std::to_string(counter++));
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) return false;
    out << serialize(key, result);
    if (!out.flush()) return false;
  }
  fs::rename(tmp, final_path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    return false;
  }
  return true;
}

}  // namespace divest::approx
