#pragma once

#include <string>
#include <vector>

namespace laudit::harness {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNoEvidence = 1;  ///< only with --expect-evidence
inline constexpr int kExitError = 2;

/// Runs one subcommand. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, char** argv);

}  // namespace laudit::harness
