#pragma once

#include <ostream>

namespace bsc {

// Fast invariant checks (identities, determinism, clean-chain recovery).
// Writes one line per check and returns the number of failures.
int run_selftest(std::ostream& log);

}  // namespace bsc
