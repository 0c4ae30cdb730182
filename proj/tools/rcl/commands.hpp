// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rcl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // runtime error or failed statistical check
inline constexpr int kExitUsage = 2;    // bad flags, bad config, violated precondition

/// Runs the driver. args[0] is the program name. Results go to `out`,
/// diagnostics to `err`; files are written under --out-dir when given.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rcl::cli
