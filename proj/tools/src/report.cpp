#include "removal/cli/report.hpp"

#include <cmath>
#include <cstdio>

namespace removal::cli {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void Report::section(const std::string& name) { section_ = name; }

void Report::add(const std::string& key, nlohmann::ordered_json value) {
  const std::string full = section_.empty() ? key : section_ + "." + key;
  entries_[full] = std::move(value);
}

void Report::add_real(const std::string& key, double value) {
  if (std::isfinite(value)) add(key, value);
  else add(key, format_real(value));
}

std::string Report::text() const {
  std::string out;
  for (const auto& [key, value] : entries_.items()) {
    out += key;
    out += ": ";
    if (value.is_string()) out += value.get<std::string>();
    else if (value.is_number_float()) out += format_real(value.get<double>());
    else out += value.dump();
    out += '\n';
  }
  return out;
}

std::string Report::json() const { return entries_.dump(2) + "\n"; }

}  // namespace removal::cli
