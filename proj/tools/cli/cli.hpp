#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace scc::cli {

enum ExitCode { kOk = 0, kUsage = 1, kDataError = 2, kNumericError = 3 };

/// Runs one `scc` invocation; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace scc::cli
