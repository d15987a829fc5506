#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sbcn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs the `sbcn` command line; `args` excludes the program name.
/// Exit codes: 0 success, 1 runtime or IO failure, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sbcn::cli
