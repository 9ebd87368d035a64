#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "removal/cli/app.hpp"
#include "removal/junta.hpp"

namespace removal::cli {

struct Context {
  const Config& cfg;
  Report& rep;
  std::uint64_t seed = kDefaultSeed;
  CaptureMode mode = CaptureMode::kPractical;
  std::size_t cap_points = 0;
  std::size_t cap_mwis = 0;
  std::optional<std::string> out_dir;
  std::string message;  // set by a command that returns a nonzero exit code
  // Chain shared by every function of the run, so their spaces compare equal.
  mutable std::shared_ptr<const BaseChain> chain;
};

struct CommandEntry {
  std::string name;
  std::string help;
  std::function<int(Context&)> run;
};

const std::vector<CommandEntry>& commands();

}  // namespace removal::cli
