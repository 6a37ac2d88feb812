#pragma once

#include <iosfwd>

namespace lelong::cli {

enum ExitCode : int { kSuccess = 0, kVerificationFailure = 1, kInvalidInput = 2, kNumericalFailure = 3 };

/// Parses argv, runs one command and writes its output to `out`. Errors are
/// reported as a single line on `err`; the return value is the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lelong::cli
