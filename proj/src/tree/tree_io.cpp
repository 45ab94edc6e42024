// Copyright 2026 The FourierSHAP Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fshap/tree_io.hpp"

#include <map>
#include <mutex>

#include "fshap/json_util.hpp"

namespace fshap {

using nlohmann::json;
namespace ju = json_util;

namespace {

constexpr std::size_t kMaxParseDepth = 512;

json node_to_json(const DecisionTree& tree, std::int32_t id) {
  const auto& nd = tree.node(id);
  if (nd.is_leaf()) return {{"value", nd.value}};
  return {{"feature", nd.feature},
          {"left", node_to_json(tree, nd.left)},
          {"right", node_to_json(tree, nd.right)}};
}

std::int32_t parse_node(const json& j, const std::string& ptr, std::size_t n,
                        std::size_t depth, std::vector<DecisionTree::Node>& nodes) {
  if (depth > kMaxParseDepth) throw SchemaError(ptr, "tree nesting too deep");
  if (!j.is_object()) throw SchemaError(ptr, "expected a node object");
  const auto id = static_cast<std::int32_t>(nodes.size());
  nodes.emplace_back();
  if (j.contains("value")) {
    if (j.contains("feature") || j.contains("left") || j.contains("right")) {
      throw SchemaError(ptr, "a leaf must not carry split fields");
    }
    nodes[static_cast<std::size_t>(id)].value = ju::as_double(j["value"], ptr + "/value");
    return id;
  }
  const auto feature = ju::as_index(ju::field(j, ptr, "feature"), ptr + "/feature");
  if (feature >= n) {
    throw SchemaError(ptr + "/feature", "feature " + std::to_string(feature) +
                                            " out of range for n_features=" +
                                            std::to_string(n));
  }
  const auto left = parse_node(ju::field(j, ptr, "left"), ptr + "/left", n, depth + 1, nodes);
  const auto right =
      parse_node(ju::field(j, ptr, "right"), ptr + "/right", n, depth + 1, nodes);
  auto& nd = nodes[static_cast<std::size_t>(id)];
  nd.feature = static_cast<std::int32_t>(feature);
  nd.left = left;
  nd.right = right;
  return id;
}

struct ConverterRegistry {
  std::mutex mutex;
  std::map<std::string, ModelConverter> converters{{"native", &ensemble_from_json}};
};

ConverterRegistry& registry() {
  static ConverterRegistry r;
  return r;
}

}  // namespace

json ensemble_to_json(const TreeEnsemble& ensemble) {
  json trees = json::array();
  for (const auto& t : ensemble.trees()) {
    trees.push_back({{"weight", t.weight}, {"root", node_to_json(t.tree, t.tree.root())}});
  }
  return {{"n_features", ensemble.n_features()},
          {"combine", "weighted_sum"},
          {"trees", std::move(trees)}};
}

TreeEnsemble ensemble_from_json(const json& doc) {
  const auto n = ju::as_index(ju::field(doc, "", "n_features"), "/n_features");
  const auto combine = ju::as_string(ju::field(doc, "", "combine"), "/combine");
  if (combine != "weighted_sum") {
    throw SchemaError("/combine", "unsupported combine rule '" + combine + "'");
  }
  const json& trees = ju::array_at(ju::field(doc, "", "trees"), "/trees");
  std::vector<WeightedTree> out;
  out.reserve(trees.size());
  for (std::size_t t = 0; t < trees.size(); ++t) {
    const std::string ptr = ju::child("/trees", t);
    const double weight = ju::as_double(ju::field(trees[t], ptr, "weight"), ptr + "/weight");
    std::vector<DecisionTree::Node> nodes;
    parse_node(ju::field(trees[t], ptr, "root"), ptr + "/root", n, 0, nodes);
    out.push_back({weight, DecisionTree(std::move(nodes), 0)});
  }
  return TreeEnsemble(n, std::move(out));
}

void register_model_converter(const std::string& format, ModelConverter converter) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  r.converters[format] = std::move(converter);
}

std::vector<std::string> model_formats() {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  std::vector<std::string> names;
  for (const auto& [name, fn] : r.converters) names.push_back(name);
  return names;
}

TreeEnsemble load_model(const std::filesystem::path& path, const std::string& format) {
  ModelConverter convert;
  {
    auto& r = registry();
    std::lock_guard lock(r.mutex);
    auto it = r.converters.find(format);
    if (it == r.converters.end()) {
      throw InvalidArgument("no converter registered for model format '" + format + "'");
    }
    convert = it->second;
  }
  return convert(ju::read_file(path));
}

void save_model(const std::filesystem::path& path, const TreeEnsemble& ensemble) {
  ju::write_file(path, ensemble_to_json(ensemble));
}

}  // namespace fshap
