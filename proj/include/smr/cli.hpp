#pragma once

#include <iosfwd>

namespace smr {

/// Entry point of the smr-axioms command line.
/// Exit codes: 0 success, 1 data error or failed check, 2 usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace smr
