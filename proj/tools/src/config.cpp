#include "removal/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace removal::cli {

namespace {

std::string describe(const nlohmann::json& v) {
  std::string s = v.dump();
  if (s.size() > 40) s = s.substr(0, 37) + "...";
  return s;
}

}  // namespace

double parse_real(const std::string& text, const std::string& what) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw ConfigError(what + ": not a number: '" + text + "'");
    }
    if (used != s.size()) throw ConfigError(what + ": not a number: '" + text + "'");
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string::npos) return number(text);
  const double num = number(text.substr(0, slash));
  const double den = number(text.substr(slash + 1));
  if (den == 0.0) throw ConfigError(what + ": zero denominator in '" + text + "'");
  return num / den;
}

Config::Config(nlohmann::json root, std::string origin)
    : root_(std::move(root)), origin_(std::move(origin)) {
  if (!root_.is_object()) throw ConfigError(origin_ + ": top level must be a JSON object");
}

Config Config::from_text(const std::string& text, const std::string& origin) {
  try {
    return Config(nlohmann::json::parse(text), origin);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(column) +
                      ": JSON syntax error");
  }
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str(), path);
}

void Config::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("--set expects key=value, got '" + assignment + "'");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  set(key, std::move(value));
}

void Config::set(const std::string& key, nlohmann::json value) { root_[key] = std::move(value); }

bool Config::has(const std::string& key) const { return root_.contains(key) && !root_[key].is_null(); }

std::string Config::base_dir() const {
  if (origin_.empty() || origin_.front() == '<') return ".";
  const auto parent = std::filesystem::path(origin_).parent_path();
  return parent.empty() ? "." : parent.string();
}

const nlohmann::json& Config::at(const std::string& key) const {
  if (!has(key)) throw ConfigError(origin_ + ": missing field '" + key + "'");
  return root_[key];
}

std::string Config::string(const std::string& key) const {
  const auto& v = at(key);
  if (!v.is_string()) throw ConfigError(origin_ + ": field '" + key + "': expected a string, got " + describe(v));
  return v.get<std::string>();
}

std::string Config::string(const std::string& key, const std::string& fallback) const {
  return has(key) ? string(key) : fallback;
}

double Config::real(const std::string& key) const {
  const auto& v = at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_real(v.get<std::string>(), origin_ + ": field '" + key + "'");
  throw ConfigError(origin_ + ": field '" + key + "': expected a number, got " + describe(v));
}

double Config::real(const std::string& key, double fallback) const {
  return has(key) ? real(key) : fallback;
}

double Config::real_in(const std::string& key, double fallback, double lo, double hi, bool lo_closed,
                       bool hi_closed) const {
  const double v = real(key, fallback);
  const bool lo_ok = lo_closed ? v >= lo : v > lo;
  const bool hi_ok = hi_closed ? v <= hi : v < hi;
  if (!std::isfinite(v) || !lo_ok || !hi_ok) {
    std::ostringstream os;
    os << origin_ << ": field '" << key << "': " << v << " outside " << (lo_closed ? "[" : "(") << lo
       << ", " << hi << (hi_closed ? "]" : ")");
    throw ConfigError(os.str());
  }
  return v;
}

std::uint64_t Config::count(const std::string& key) const {
  const auto& v = at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError(origin_ + ": field '" + key + "': expected a nonnegative integer, got " + describe(v));
}

std::uint64_t Config::count(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? count(key) : fallback;
}

std::vector<double> Config::reals(const std::string& key, std::vector<double> fallback) const {
  if (!has(key)) return fallback;
  const auto& v = at(key);
  if (!v.is_array()) throw ConfigError(origin_ + ": field '" + key + "': expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string where = origin_ + ": field '" + key + "[" + std::to_string(i) + "]'";
    if (v[i].is_number()) out.push_back(v[i].get<double>());
    else if (v[i].is_string()) out.push_back(parse_real(v[i].get<std::string>(), where));
    else throw ConfigError(where + ": expected a number");
  }
  return out;
}

std::vector<std::string> Config::strings(const std::string& key, std::vector<std::string> fallback) const {
  if (!has(key)) return fallback;
  const auto& v = at(key);
  if (v.is_string()) return {v.get<std::string>()};
  if (!v.is_array()) throw ConfigError(origin_ + ": field '" + key + "': expected an array of strings");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) throw ConfigError(origin_ + ": field '" + key + "': expected an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::vector<std::uint64_t> Config::counts(const std::string& key, std::vector<std::uint64_t> fallback) const {
  if (!has(key)) return fallback;
  const auto& v = at(key);
  if (!v.is_array()) throw ConfigError(origin_ + ": field '" + key + "': expected an array");
  std::vector<std::uint64_t> out;
  for (const auto& e : v) {
    if (!e.is_number_integer() || e.get<std::int64_t>() < 0) {
      throw ConfigError(origin_ + ": field '" + key + "': expected nonnegative integers");
    }
    out.push_back(e.get<std::uint64_t>());
  }
  return out;
}

void Config::reject_unknown(const std::vector<std::string>& known) const {
  for (const auto& [key, value] : root_.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError(origin_ + ": unknown field '" + key + "'");
    }
  }
}

}  // namespace removal::cli
