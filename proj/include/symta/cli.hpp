#pragma once

#include <iosfwd>

namespace symta {

/// Runs one command line. Exit codes: 0 success or consistent, 1 ordering
/// violated, 2 usage, parse or validation error.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace symta
