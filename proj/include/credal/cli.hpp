#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "credal/errors.hpp"

namespace credal::cli {

// Exit codes of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,           // bad flags, bad queries, bad configuration
  kParse = 2,           // unreadable or malformed files
  kValidation = 3,      // model, distribution or identification annex rejected
  kInfeasible = 4,      // identification yields an empty credal set
  kInference = 5,       // inference failed (vertex explosion, zero evidence, timeout)
  kOther = 6,
};

int exit_code_for(ErrorCode code);

// Runs one invocation; `args` excludes the program name. Results go to
// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace credal::cli
