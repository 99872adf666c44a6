#pragma once

#include <ostream>

namespace agentinterp::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitViolations = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kVersion = "0.1.0";

/// Runs one command line. Human-readable output goes to `out`, diagnostics
/// to `err`. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace agentinterp::cli
