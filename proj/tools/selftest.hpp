#pragma once

#include <iosfwd>

namespace divest::cli {

// Runs the fixture-free invariant checks, printing one `PASS`/`FAIL` line per
// check. Returns the number of failures.
int run_selftest(std::ostream& out);

}  // namespace divest::cli
