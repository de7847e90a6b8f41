#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mucows {

// Exit statuses of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

// Runs the cows command line. args excludes the program name; `in` feeds
// the interactive stepper.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace mucows
