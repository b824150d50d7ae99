#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rismux {

// Full command-line front end: subcommands sweep, optimize, selftest.
// Exit status: 0 success, 1 runtime failure (partial outputs flagged in the
// manifest), 2 usage error.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, const char* const* argv);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rismux
