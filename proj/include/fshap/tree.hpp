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

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fshap/bits.hpp"
#include "fshap/spectrum.hpp"

namespace fshap {

/// Spectra of trees deeper than this are refused (support can reach 4^depth).
inline constexpr std::size_t kMaxTransformDepth = 40;

/// Binary decision tree over binary features, stored as a node arena.
/// Internal nodes send x[feature] == 0 to the left child and 1 to the right.
class DecisionTree {
 public:
  struct Node {
    std::int32_t feature = -1;  // -1 marks a leaf
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;

    bool is_leaf() const noexcept { return feature < 0; }
  };

  /// Validates that `nodes` form a single tree rooted at `root` (every other
  /// node referenced exactly once, no cycles).
  DecisionTree(std::vector<Node> nodes, std::int32_t root = 0);

  static DecisionTree leaf(double value);
  static DecisionTree split(std::size_t feature, const DecisionTree& left,
                            const DecisionTree& right);

  std::int32_t root() const noexcept { return root_; }
  const Node& node(std::int32_t i) const { return nodes_.at(static_cast<std::size_t>(i)); }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }

  std::size_t depth() const noexcept { return depth_; }
  /// One past the largest split feature (0 for a lone leaf).
  std::size_t feature_bound() const noexcept { return feature_bound_; }

  /// Tree with every leaf value multiplied by s.
  DecisionTree scaled(double s) const;

 private:
  std::vector<Node> nodes_;
  std::int32_t root_ = 0;
  std::size_t depth_ = 0;
  std::size_t feature_bound_ = 0;
};

struct WeightedTree {
  double weight = 1.0;
  DecisionTree tree;
};

/// prediction(x) = sum_t weight_t * tree_t(x). Random forests use weights
/// 1/T, boosted models weight 1.
class TreeEnsemble {
 public:
  TreeEnsemble(std::size_t n_features, std::vector<WeightedTree> trees);

  std::size_t n_features() const noexcept { return n_; }
  const std::vector<WeightedTree>& trees() const noexcept { return trees_; }
  std::size_t max_depth() const noexcept;

  double predict(const PointVector& x) const;

 private:
  std::size_t n_;
  std::vector<WeightedTree> trees_;
};

double eval_tree(const DecisionTree& tree, const PointVector& x);

struct TreeTransformStats {
  std::size_t internal_nodes = 0;
  /// Internal nodes whose support exceeded 2 * (k_left + k_right); the
  /// merge rule makes this impossible, so anything nonzero is a bug.
  std::size_t bound_violations = 0;
  std::size_t max_node_support = 0;
};

/// Exact spectrum of a tree over n variables via the split identity
///   t = (1 + (-1)^x_i)/2 * t_left + (1 - (-1)^x_i)/2 * t_right,
/// i.e. merge(L, R) = (L + R)/2 + shift_i(L - R)/2 where shift_i XORs e_i
/// into every frequency. Iterative post-order, no recursion.
SparseSpectrum tree_to_spectrum(const DecisionTree& tree, std::size_t n,
                                TreeTransformStats* stats = nullptr);

/// Weighted sum of per-tree spectra. Trees transform in parallel; the
/// accumulation runs in tree order, so the result is thread-count invariant.
SparseSpectrum ensemble_to_spectrum(const TreeEnsemble& ensemble, unsigned threads = 1,
                                    TreeTransformStats* stats = nullptr);

}  // namespace fshap
