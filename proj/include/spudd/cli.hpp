#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spudd {

// Exit codes of the command line tool.
constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitEmptyContour = 3;

// Runs one `spudd` invocation. args excludes the program name. Reports go to
// out, diagnostics to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace spudd
