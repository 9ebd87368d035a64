#pragma once

#include <string>

#include <json.hpp>

namespace removal::cli {

// Ordered key/value report. The text body and the JSON sidecar carry the same entries;
// timing is held apart so bodies of repeated runs compare byte for byte.
class Report {
 public:
  void add(const std::string& key, nlohmann::ordered_json value);
  void add_real(const std::string& key, double value);
  // Later keys are written as "<name>.<key>"; an empty name clears the prefix.
  void section(const std::string& name);

  const nlohmann::ordered_json& entries() const noexcept { return entries_; }

  std::string text() const;
  std::string json() const;

  void set_timing(double seconds) { seconds_ = seconds; }
  double timing() const noexcept { return seconds_; }

 private:
  nlohmann::ordered_json entries_ = nlohmann::ordered_json::object();
  std::string section_;
  double seconds_ = 0.0;
};

// %.17g, with non-finite values spelled out.
std::string format_real(double v);

}  // namespace removal::cli
