#pragma once

#include <iosfwd>

namespace ciforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitEstimationError = 2;

/// Entry point of the `ciforge` tool: estimate | simulate | benchmark | bench-time.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ciforge::cli
