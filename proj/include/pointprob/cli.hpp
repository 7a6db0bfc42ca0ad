#pragma once

#include <iosfwd>

namespace pointprob {

// Entry point of the command line tool; returns the process exit code.
//   0  success
//   2  usage errors, unreadable files, or JSON of the wrong shape
//   3  well-formed input with invalid values
//   4  domain failures (constant sum, unreachable target, unbounded side)
//   5  a monotonicity check that found a violation
//   6  resource limits exceeded
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pointprob
