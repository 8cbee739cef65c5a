#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace netexplain::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitUsage = 64;

/// Runs one invocation. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace netexplain::cli
