#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "arx/error.hpp"

namespace arx::cli {

/// Process exit codes.
enum ExitCode : int {
  exit_ok = 0,
  exit_threshold_fail = 1,
  exit_usage = 2,
  exit_data = 3,
  exit_numerical = 4,
};

int exit_code_for(ErrorKind kind);

/// Runs `arx <command> [flags...]`; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace arx::cli
