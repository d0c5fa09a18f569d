#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lexbias::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kUsage = 2 };

// Runs one `lexbias` invocation. args excludes the program name. Tables go to
// `out`, diagnostics and usage text to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lexbias::cli
