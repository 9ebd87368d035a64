#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "removal/cli/config.hpp"
#include "removal/cli/report.hpp"

namespace removal::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitSoftFailure = 1,
  kExitInvariant = 2,
  kExitConfig = 3,
};

inline constexpr std::uint64_t kDefaultSeed = 20240917;
// Reported quantities are recomputed by a second code path; a larger gap aborts the run.
inline constexpr double kRecheckTolerance = 1e-9;

struct RunOptions {
  std::string command;
  Config config;
  std::optional<std::string> out_dir;
};

struct RunResult {
  int exit_code = kExitOk;
  Report report;
  std::string message;  // failure reason, empty on success
};

// Runs one command. Library and config exceptions become exit codes here.
RunResult run(const RunOptions& options);

// Full command-line entry point; writes report.txt and report.json under --out.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace removal::cli
