#pragma once

#include <memory>
#include <string>
#include <vector>

#include "removal/chain.hpp"
#include "removal/functions.hpp"
#include "removal/kneser.hpp"

namespace removal::cli {

struct ChainInput {
  Matrix transition;
  std::vector<std::string> labels;
};

// "builtin:k3", "builtin:disjointness:<p>", or a JSON file
// {"states": [...], "rows": [[...], ...]} whose entries are numbers or "a/b" strings.
// Relative paths resolve against base_dir. Not validated.
ChainInput load_chain_matrix(const std::string& source, const std::string& base_dir);

// load_chain_matrix() then validate_chain(); ChainError propagates.
std::shared_ptr<const BaseChain> load_chain(const std::string& source, const std::string& base_dir);

// Text function file:
//   chain <chain source>
//   n <dimension>
//   range unit|signed
//   values
//   <one value per line, canonical point order>
// Lines starting with '#' are ignored; the chain source resolves against the file's directory.
PointFunction load_function(const std::string& path, std::size_t point_cap);
void save_function(const std::string& path, const std::string& chain_source, const PointFunction& f);

// Layer file: "n k" then C(n, k) values in subset-rank order, whitespace separated.
LayerFunction load_layer(const std::string& path);
void save_layer(const std::string& path, const LayerFunction& f);

}  // namespace removal::cli
