#pragma once

#include <ostream>

#include "solitonlab_tools/config.hpp"

namespace solitonlab::tools {

enum ExitCode : int {
  exit_ok = 0,
  exit_invalid_config = 2,
  exit_numeric_failure = 3,
  exit_undecided = 4,
};

/// Runs exactly one subcommand, writes its result files and a manifest into
/// config.output.directory and prints the main JSON result to `out`.
/// Diagnostics go to `err`. Returns the process exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace solitonlab::tools
