#pragma once

#include <iosfwd>

namespace psml::app {

enum ExitCode { kOk = 0, kConfigError = 2, kNumericalFailure = 3 };

// Parses argv ("psml <subcommand> ...") and runs the subcommand. Errors are
// reported on `err` and mapped to ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace psml::app
