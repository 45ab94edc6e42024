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

#include "fshap/tree.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <utility>

#include "fshap/error.hpp"
#include "fshap/parallel.hpp"

namespace fshap {

DecisionTree::DecisionTree(std::vector<Node> nodes, std::int32_t root)
    : nodes_(std::move(nodes)), root_(root) {
  const auto count = static_cast<std::int32_t>(nodes_.size());
  if (root_ < 0 || root_ >= count) throw InvalidArgument("tree root index out of range");

  std::vector<std::uint8_t> seen(nodes_.size(), 0);
  std::vector<std::pair<std::int32_t, std::size_t>> stack{{root_, 0}};
  seen[static_cast<std::size_t>(root_)] = 1;
  std::size_t visited = 0;
  while (!stack.empty()) {
    const auto [id, d] = stack.back();
    stack.pop_back();
    ++visited;
    depth_ = std::max(depth_, d);
    const Node& nd = nodes_[static_cast<std::size_t>(id)];
    if (nd.is_leaf()) {
      if (!std::isfinite(nd.value)) throw InvalidArgument("non-finite leaf value");
      continue;
    }
    feature_bound_ = std::max(feature_bound_, static_cast<std::size_t>(nd.feature) + 1);
    for (std::int32_t c : {nd.left, nd.right}) {
      if (c < 0 || c >= count) {
        throw InvalidArgument("node " + std::to_string(id) + " has a child out of range");
      }
      if (seen[static_cast<std::size_t>(c)]++) {
        throw InvalidArgument("node " + std::to_string(c) + " is reachable twice");
      }
      stack.emplace_back(c, d + 1);
    }
  }
  if (visited != nodes_.size()) throw InvalidArgument("tree has unreachable nodes");
}

DecisionTree DecisionTree::leaf(double value) {
  return DecisionTree({Node{-1, -1, -1, value}}, 0);
}

DecisionTree DecisionTree::split(std::size_t feature, const DecisionTree& left,
                                 const DecisionTree& right) {
  std::vector<Node> nodes;
  nodes.reserve(1 + left.nodes_.size() + right.nodes_.size());
  nodes.push_back(Node{static_cast<std::int32_t>(feature), 0, 0, 0.0});
  auto append = [&nodes](const DecisionTree& t) {
    const auto offset = static_cast<std::int32_t>(nodes.size());
    for (Node nd : t.nodes_) {
      if (!nd.is_leaf()) {
        nd.left += offset;
        nd.right += offset;
      }
      nodes.push_back(nd);
    }
    return offset + t.root_;
  };
  nodes[0].left = append(left);
  nodes[0].right = append(right);
  return DecisionTree(std::move(nodes), 0);
}

DecisionTree DecisionTree::scaled(double s) const {
  auto nodes = nodes_;
  for (auto& nd : nodes) {
    if (nd.is_leaf()) nd.value *= s;
  }
  return DecisionTree(std::move(nodes), root_);
}

TreeEnsemble::TreeEnsemble(std::size_t n_features, std::vector<WeightedTree> trees)
    : n_(n_features), trees_(std::move(trees)) {
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    if (trees_[t].tree.feature_bound() > n_) {
      throw DimensionError("tree " + std::to_string(t) + " splits on feature " +
                           std::to_string(trees_[t].tree.feature_bound() - 1) +
                           " but the ensemble has " + std::to_string(n_) + " features");
    }
    if (!std::isfinite(trees_[t].weight)) throw InvalidArgument("non-finite tree weight");
  }
}

std::size_t TreeEnsemble::max_depth() const noexcept {
  std::size_t d = 0;
  for (const auto& t : trees_) d = std::max(d, t.tree.depth());
  return d;
}

double TreeEnsemble::predict(const PointVector& x) const {
  if (x.size() != n_) throw DimensionError("point dimension mismatch in ensemble predict");
  double acc = 0.0;
  for (const auto& t : trees_) acc += t.weight * eval_tree(t.tree, x);
  return acc;
}

double eval_tree(const DecisionTree& tree, const PointVector& x) {
  std::int32_t id = tree.root();
  for (;;) {
    const auto& nd = tree.node(id);
    if (nd.is_leaf()) return nd.value;
    const auto f = static_cast<std::size_t>(nd.feature);
    if (f >= x.size()) throw DimensionError("tree feature out of range for point");
    id = x.test(f) ? nd.right : nd.left;
  }
}

namespace {

using TermMap = std::unordered_map<Frequency, double, FrequencyHash>;

void drop_small(TermMap& m) {
  std::erase_if(m, [](const auto& kv) { return std::abs(kv.second) < kZeroDropThreshold; });
}

}  // namespace

SparseSpectrum tree_to_spectrum(const DecisionTree& tree, std::size_t n,
                                TreeTransformStats* stats) {
  if (tree.depth() > kMaxTransformDepth) {
    throw ResourceError("tree depth " + std::to_string(tree.depth()) +
                        " exceeds the transform guard of " +
                        std::to_string(kMaxTransformDepth));
  }
  if (tree.feature_bound() > n) throw DimensionError("tree splits on a feature >= n");

  TreeTransformStats local;
  std::vector<TermMap> spectra(tree.nodes().size());
  // (node, children_done)
  std::vector<std::pair<std::int32_t, bool>> stack{{tree.root(), false}};
  while (!stack.empty()) {
    auto [id, expanded] = stack.back();
    stack.pop_back();
    const auto& nd = tree.node(id);
    auto& out = spectra[static_cast<std::size_t>(id)];
    if (nd.is_leaf()) {
      if (nd.value != 0.0) out.emplace(Frequency(n), nd.value);
      continue;
    }
    if (!expanded) {
      stack.emplace_back(id, true);
      stack.emplace_back(nd.right, false);
      stack.emplace_back(nd.left, false);
      continue;
    }
    auto& left = spectra[static_cast<std::size_t>(nd.left)];
    auto& right = spectra[static_cast<std::size_t>(nd.right)];
    const auto feature = static_cast<std::size_t>(nd.feature);
    out.reserve(2 * (left.size() + right.size()));
    for (const auto& [f, c] : left) {
      out[f] += 0.5 * c;
      out[f.flipped(feature)] += 0.5 * c;
    }
    for (const auto& [f, c] : right) {
      out[f] += 0.5 * c;
      out[f.flipped(feature)] -= 0.5 * c;
    }
    drop_small(out);
    ++local.internal_nodes;
    if (out.size() > 2 * (left.size() + right.size())) ++local.bound_violations;
    local.max_node_support = std::max(local.max_node_support, out.size());
    TermMap().swap(left);
    TermMap().swap(right);
  }

  auto& root = spectra[static_cast<std::size_t>(tree.root())];
  local.max_node_support = std::max(local.max_node_support, root.size());
  std::vector<SpectrumTerm> terms;
  terms.reserve(root.size());
  for (auto& [f, c] : root) terms.push_back({f, c});
  if (stats) {
    stats->internal_nodes += local.internal_nodes;
    stats->bound_violations += local.bound_violations;
    stats->max_node_support = std::max(stats->max_node_support, local.max_node_support);
  }
  return SparseSpectrum::from_terms(n, std::move(terms));
}

SparseSpectrum ensemble_to_spectrum(const TreeEnsemble& ensemble, unsigned threads,
                                    TreeTransformStats* stats) {
  const auto& trees = ensemble.trees();
  std::vector<SparseSpectrum> per_tree(trees.size());
  std::vector<TreeTransformStats> per_stats(trees.size());
  parallel_for(trees.size(), threads, [&](std::size_t t) {
    per_tree[t] = tree_to_spectrum(trees[t].tree, ensemble.n_features(), &per_stats[t]);
  });
  SpectrumAccumulator acc(ensemble.n_features());
  for (std::size_t t = 0; t < trees.size(); ++t) {
    acc.add(per_tree[t], trees[t].weight);
    if (stats) {
      stats->internal_nodes += per_stats[t].internal_nodes;
      stats->bound_violations += per_stats[t].bound_violations;
      stats->max_node_support =
          std::max(stats->max_node_support, per_stats[t].max_node_support);
    }
  }
  return acc.build();
}

}  // namespace fshap
