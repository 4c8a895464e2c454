#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace edag {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitAnalysis = 2;

/// Runs one command line (without the program name). Results go to `out`
/// unless `--out` names a file; diagnostics, warnings and progress go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace edag
