#pragma once

#include <ostream>

namespace ipomp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitClient = 3;
inline constexpr int kExitAllFailed = 4;

/// Entry point of the `ipomp` command-line tool. Returns the process exit
/// code; never calls exit().
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace ipomp
