#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>

#include "divest/histogram.hpp"

namespace divest::cli {

// Symbol -> count, as read from a `symbol count` file.
using KeyedCounts = std::map<std::string, std::int64_t>;

KeyedCounts parse_histogram(std::istream& in);
KeyedCounts read_histogram(const std::filesystem::path& path);
void write_histogram(std::ostream& out, const KeyedCounts& counts);

// Aligns both inputs on the sorted union of their keys; absent symbols get
// count 0. Each histogram's rate is its total count (at least 1).
std::pair<Histogram, Histogram> align(const KeyedCounts& p, const KeyedCounts& q);

}  // namespace divest::cli
