#pragma once

#include <iosfwd>

namespace svev::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSuiteFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

// Entry point of the svev tool. Output meant for stdout goes to `out`,
// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace svev::cli
