#include "removal/cli/io.hpp"

#include <cstdio>
#include <filesystem>
#include <optional>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "removal/cli/config.hpp"

namespace removal::cli {

namespace {

std::string resolve(const std::string& path, const std::string& base_dir) {
  const std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return p.string();
  return (std::filesystem::path(base_dir) / p).string();
}

std::string read_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw ConfigError(std::string("cannot open ") + what + " '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double json_entry(const nlohmann::json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_real(v.get<std::string>(), where);
  throw ConfigError(where + ": expected a number or an \"a/b\" string");
}

std::string value_text(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ChainInput load_chain_matrix(const std::string& source, const std::string& base_dir) {
  if (source == "builtin:k3") {
    const BaseChain c = k3_chain();
    return {c.transition(), c.labels()};
  }
  const std::string disj = "builtin:disjointness:";
  if (source.rfind(disj, 0) == 0) {
    const double p = parse_real(source.substr(disj.size()), "chain '" + source + "'");
    if (!(p > 0.0 && p < 0.5)) throw ConfigError("chain '" + source + "': p must lie in (0, 1/2)");
    const BaseChain c = disjointness_chain(p);
    return {c.transition(), c.labels()};
  }
  if (source.rfind("builtin:", 0) == 0) throw ConfigError("unknown builtin chain '" + source + "'");

  const std::string path = resolve(source, base_dir);
  const std::string text = read_file(path, "chain file");
  const Config doc = Config::from_text(text, path);
  const nlohmann::json& root = doc.root();
  if (!root.contains("rows") || !root["rows"].is_array() || root["rows"].empty()) {
    throw ConfigError(path + ": field 'rows' must be a non-empty array");
  }
  const auto& rows = root["rows"];
  const std::size_t m = rows.size();
  ChainInput in;
  in.transition = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    if (!rows[i].is_array() || rows[i].size() != m) {
      throw ConfigError(path + ": field 'rows[" + std::to_string(i) + "]' must have " + std::to_string(m) +
                        " entries");
    }
    for (std::size_t j = 0; j < m; ++j) {
      in.transition(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          json_entry(rows[i][j], path + ": field 'rows[" + std::to_string(i) + "][" + std::to_string(j) + "]'");
    }
  }
  if (root.contains("states")) {
    const auto& s = root["states"];
    if (!s.is_array() || s.size() != m) throw ConfigError(path + ": field 'states' must list one label per row");
    for (const auto& e : s) in.labels.push_back(e.is_string() ? e.get<std::string>() : e.dump());
  }
  return in;
}

std::shared_ptr<const BaseChain> load_chain(const std::string& source, const std::string& base_dir) {
  ChainInput in = load_chain_matrix(source, base_dir);
  return std::make_shared<const BaseChain>(validate_chain(in.transition, std::move(in.labels)));
}

PointFunction load_function(const std::string& path, std::size_t point_cap) {
  std::istringstream in(read_file(path, "function file"));
  const std::string base = std::filesystem::path(path).parent_path().string();
  std::string chain_source;
  std::optional<std::size_t> n;
  Range range = Range::kUnit;
  std::vector<double> values;
  bool in_values = false;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw ConfigError(path + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line.substr(first));
    if (in_values) {
      std::string tok;
      while (ls >> tok) values.push_back(parse_real(tok, path + ":" + std::to_string(lineno)));
      continue;
    }
    std::string key;
    ls >> key;
    if (key == "chain") {
      if (!(ls >> chain_source)) fail("chain needs a source");
    } else if (key == "n") {
      std::size_t v = 0;
      if (!(ls >> v)) fail("n needs a nonnegative integer");
      n = v;
    } else if (key == "range") {
      std::string r;
      ls >> r;
      if (r == "unit") range = Range::kUnit;
      else if (r == "signed") range = Range::kSigned;
      else fail("range must be unit or signed");
    } else if (key == "values") {
      in_values = true;
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  if (chain_source.empty()) throw ConfigError(path + ": missing 'chain' line");
  if (!n) throw ConfigError(path + ": missing 'n' line");
  ProductSpace space(load_chain(chain_source, base.empty() ? "." : base), *n, point_cap);
  if (values.size() != space.size()) {
    throw ConfigError(path + ": expected " + std::to_string(space.size()) + " values, found " +
                      std::to_string(values.size()));
  }
  try {
    return PointFunction(space, std::move(values), range);
  } catch (const DomainError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void save_function(const std::string& path, const std::string& chain_source, const PointFunction& f) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << "chain " << chain_source << "\n";
  out << "n " << f.space().n() << "\n";
  out << "range " << to_string(f.range()) << "\n";
  out << "values\n";
  for (double v : f.values()) out << value_text(v) << "\n";
}

LayerFunction load_layer(const std::string& path) {
  std::istringstream in(read_file(path, "layer file"));
  std::size_t n = 0;
  std::size_t k = 0;
  if (!(in >> n >> k)) throw ConfigError(path + ": header must be 'n k'");
  std::vector<double> values;
  std::string tok;
  while (in >> tok) values.push_back(parse_real(tok, path));
  try {
    return LayerFunction(n, k, std::move(values));
  } catch (const Error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void save_layer(const std::string& path, const LayerFunction& f) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << f.n() << " " << f.k() << "\n";
  for (double v : f.values()) out << value_text(v) << "\n";
}

}  // namespace removal::cli
