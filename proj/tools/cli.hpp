#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace capplan::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// args excludes the program name. Results go to `out`; every diagnostic goes
// to `err`. Returns the process exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace capplan::cli
