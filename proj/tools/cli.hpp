#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dasp::cli {

/// Exit codes: 0 ok, 1 usage, 2 domain error, 3 accuracy / numerical / sampling failure.
enum ExitCode : int { kOk = 0, kUsage = 1, kDomain = 2, kAccuracy = 3 };

/// Runs one subcommand; `args` excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dasp::cli
