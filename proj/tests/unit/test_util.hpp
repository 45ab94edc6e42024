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

// Generators and reference oracles shared by the unit tests. The oracles here
// are deliberately naive and independent of the library code under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "fshap/bits.hpp"
#include "fshap/shap.hpp"
#include "fshap/spectrum.hpp"
#include "fshap/tree.hpp"

namespace fshap::testing {

inline std::string data_path(const std::string& name) {
  return std::string(FSHAP_TEST_DATA_DIR) + "/" + name;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
  static int counter = 0;
  auto p = std::filesystem::temp_directory_path() /
           ("fshap_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

/// Generators use std::mt19937_64 only through raw draws, scaled by hand so
/// sequences are identical across standard libraries.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}
  std::uint64_t word() { return eng_(); }
  std::size_t below(std::size_t bound) { return static_cast<std::size_t>(eng_() % bound); }
  double uniform(double lo = 0.0, double hi = 1.0) {
    return lo + (hi - lo) * static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }
  bool coin() { return eng_() >> 63; }

  PointVector point(std::size_t n) {
    std::vector<std::uint8_t> b(n);
    for (auto& v : b) v = coin();
    return PointVector::from_bits(b);
  }

  std::vector<PointVector> points(std::size_t n, std::size_t count) {
    std::vector<PointVector> out;
    for (std::size_t r = 0; r < count; ++r) out.push_back(point(n));
    return out;
  }

  Frequency frequency(std::size_t n, std::size_t max_degree) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const std::size_t d = below(std::min(max_degree, n) + 1);
    for (std::size_t j = 0; j < d; ++j) std::swap(idx[j], idx[j + below(n - j)]);
    idx.resize(d);
    return Frequency::from_indices(n, idx);
  }

  /// Up to k distinct random frequencies with coefficients in [-1, 1].
  SparseSpectrum spectrum(std::size_t n, std::size_t k, std::size_t max_degree = 64) {
    std::vector<SpectrumTerm> terms;
    std::vector<Frequency> seen;
    for (std::size_t attempt = 0; terms.size() < k && attempt < 50 * k + 50; ++attempt) {
      auto f = frequency(n, max_degree);
      if (std::find(seen.begin(), seen.end(), f) != seen.end()) continue;
      seen.push_back(f);
      terms.push_back({f, uniform(-1.0, 1.0)});
    }
    return SparseSpectrum::from_terms(n, std::move(terms));
  }

  DecisionTree tree(std::size_t n, std::size_t depth, double leaf_prob = 0.15) {
    std::vector<DecisionTree::Node> nodes;
    build(nodes, n, depth, leaf_prob, true);
    return DecisionTree(std::move(nodes));
  }

 private:
  std::int32_t build(std::vector<DecisionTree::Node>& nodes, std::size_t n, std::size_t depth,
                     double leaf_prob, bool root) {
    const auto id = static_cast<std::int32_t>(nodes.size());
    nodes.push_back({});
    if (depth == 0 || (!root && uniform() < leaf_prob)) {
      nodes[id].value = std::round(uniform(-4.0, 4.0) * 64.0) / 64.0;
      return id;
    }
    nodes[id].feature = static_cast<std::int32_t>(below(n));
    const auto l = build(nodes, n, depth - 1, leaf_prob, false);
    const auto r = build(nodes, n, depth - 1, leaf_prob, false);
    nodes[id].left = l;
    nodes[id].right = r;
    return id;
  }

  std::mt19937_64 eng_;
};

inline PointVector point_of_mask(std::size_t n, std::uint64_t mask) {
  std::vector<std::uint8_t> b(n);
  for (std::size_t j = 0; j < n; ++j) b[j] = (mask >> j) & 1u;
  return PointVector::from_bits(b);
}

/// Naive evaluation straight from the definition, bit by bit.
inline double naive_eval(const SparseSpectrum& s, const PointVector& x) {
  double acc = 0.0;
  for (const auto& t : s.terms()) {
    int parity = 0;
    for (std::size_t j = 0; j < x.size(); ++j) parity ^= (t.freq.test(j) && x.test(j));
    acc += parity ? -t.coef : t.coef;
  }
  return acc;
}

/// Shapley values as the average marginal contribution over all n!
/// orderings, with v(S) the interventional mean over the background.
inline std::vector<double> permutation_shapley(const std::function<double(const PointVector&)>& h,
                                               const PointVector& q,
                                               const std::vector<PointVector>& background) {
  const std::size_t n = q.size();
  auto value = [&](const std::vector<bool>& in_s) {
    double acc = 0.0;
    for (const auto& x : background) {
      std::vector<std::uint8_t> b(n);
      for (std::size_t j = 0; j < n; ++j) b[j] = in_s[j] ? q.test(j) : x.test(j);
      acc += h(PointVector::from_bits(b));
    }
    return acc / static_cast<double>(background.size());
  };
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> phi(n, 0.0);
  std::size_t perms = 0;
  do {
    std::vector<bool> in_s(n, false);
    double prev = value(in_s);
    for (std::size_t i : order) {
      in_s[i] = true;
      const double cur = value(in_s);
      phi[i] += cur - prev;
      prev = cur;
    }
    ++perms;
  } while (std::next_permutation(order.begin(), order.end()));
  for (auto& p : phi) p /= static_cast<double>(perms);
  return phi;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace fshap::testing
