#include "histogram_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "divest/error.hpp"

namespace divest::cli {

KeyedCounts parse_histogram(std::istream& in) {
  KeyedCounts counts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string symbol, count_text, extra;
    if (!(ls >> symbol)) continue;
    if (!(ls >> count_text) || (ls >> extra)) {
      throw Error(Errc::kParse, "line " + std::to_string(lineno) + ": expected `symbol count`");
    }
    std::size_t used = 0;
    long long count = -1;
    try {
      count = std::stoll(count_text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != count_text.size() || count < 0) {
      throw Error(Errc::kParse, "line " + std::to_string(lineno) + ": count '" + count_text +
                                    "' is not a nonnegative integer");
    }
    counts[symbol] += count;
  }
  return counts;
}

KeyedCounts read_histogram(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, "cannot open " + path.string());
  return parse_histogram(in);
}

void write_histogram(std::ostream& out, const KeyedCounts& counts) {
  for (const auto& [symbol, count] : counts) out << symbol << ' ' << count << '\n';
}

std::pair<Histogram, Histogram> align(const KeyedCounts& p, const KeyedCounts& q) {
  KeyedCounts keys = p;
  for (const auto& [symbol, count] : q) keys.emplace(symbol, 0);

  Histogram hp, hq;
  for (const auto& entry : keys) {
    const auto ip = p.find(entry.first);
    const auto iq = q.find(entry.first);
    hp.counts.push_back(ip == p.end() ? 0 : ip->second);
    hq.counts.push_back(iq == q.end() ? 0 : iq->second);
  }
  hp.rate = static_cast<double>(std::max<std::int64_t>(1, hp.total()));
  hq.rate = static_cast<double>(std::max<std::int64_t>(1, hq.total()));
  return {std::move(hp), std::move(hq)};
}

}  // namespace divest::cli
