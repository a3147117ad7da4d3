#ifndef STPARSE_TOOLS_CLI_H_
#define STPARSE_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace stparse::cli {

enum ExitCode { kOk = 0, kDataError = 1, kUsageError = 2 };

// Runs the stparse command line. `args` excludes the program name.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stparse::cli

#endif  // STPARSE_TOOLS_CLI_H_
