#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "removal/error.hpp"

namespace removal::cli {

// Malformed or out-of-range configuration. Exit code 3.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Parameter block of one run. Values come from the JSON config file, then `--set key=value`
// overrides, then the dedicated flags. Every getter names the field in its error.
class Config {
 public:
  Config() = default;
  explicit Config(nlohmann::json root, std::string origin = "<inline>");

  // Throws ConfigError with line and column on a JSON syntax error.
  static Config from_file(const std::string& path);
  static Config from_text(const std::string& text, const std::string& origin);

  // `key=value`; value is parsed as JSON when possible, else taken as a string.
  void set(const std::string& assignment);
  void set(const std::string& key, nlohmann::json value);

  bool has(const std::string& key) const;
  const nlohmann::json& root() const noexcept { return root_; }
  const std::string& origin() const noexcept { return origin_; }
  // Directory used to resolve relative paths.
  std::string base_dir() const;

  std::string string(const std::string& key) const;
  std::string string(const std::string& key, const std::string& fallback) const;

  // Numbers also accept "a/b" fraction strings.
  double real(const std::string& key) const;
  double real(const std::string& key, double fallback) const;
  // Open interval (lo, hi) unless the bound flag says closed.
  double real_in(const std::string& key, double fallback, double lo, double hi,
                 bool lo_closed = false, bool hi_closed = false) const;

  std::uint64_t count(const std::string& key) const;
  std::uint64_t count(const std::string& key, std::uint64_t fallback) const;

  std::vector<double> reals(const std::string& key, std::vector<double> fallback) const;
  std::vector<std::string> strings(const std::string& key, std::vector<std::string> fallback) const;
  std::vector<std::uint64_t> counts(const std::string& key, std::vector<std::uint64_t> fallback) const;

  // Fails on keys no command reads, so typos do not pass silently.
  void reject_unknown(const std::vector<std::string>& known) const;

 private:
  const nlohmann::json& at(const std::string& key) const;

  nlohmann::json root_ = nlohmann::json::object();
  std::string origin_ = "<inline>";
};

// "3/4", "0.75", "1e-3". Throws ConfigError naming `what`.
double parse_real(const std::string& text, const std::string& what);

}  // namespace removal::cli
