#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fcmi::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs one command line (without the program name). Human-readable errors go
/// to `err`; reports without an --out file go to `out`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fcmi::cli
