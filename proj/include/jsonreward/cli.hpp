#pragma once

#include <iosfwd>

namespace jsonreward::cli {

inline constexpr int kExitOk    = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo    = 3;

/// Runs one command. Records go to `out`, diagnostics to `err`; `in` is
/// read when an input path is "-".
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace jsonreward::cli
