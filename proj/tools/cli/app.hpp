#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "moikit/error.hpp"

namespace moikit::cli {

enum ExitCode : int {
  kOk = 0,
  kValidation = 2,
  kNumerical = 3,
  kBoundViolation = 4,
};

int exit_code_for(ErrorKind kind) noexcept;

/// Runs one subcommand; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace moikit::cli
