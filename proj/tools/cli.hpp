#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mixnorm::cli {

enum ExitCode : int {
    kSuccess = 0,
    kUsageError = 1,
    kNumericalError = 2,
};

/// Runs one command. args excludes the program name. `in` feeds commands that
/// read a vector from stdin.
int dispatch(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

int dispatch(int argc, char** argv);

}  // namespace mixnorm::cli
