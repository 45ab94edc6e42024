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
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "fshap/bits.hpp"
#include "fshap/shap.hpp"

namespace fshap {

using PointFunction = std::function<double(const PointVector&)>;

/// v(S) = mean over background rows x of h(q on S, x elsewhere).
class ValueFunction {
 public:
  ValueFunction(PointFunction h, PointVector query, const BackgroundDataset& background);

  std::size_t n() const noexcept { return query_.size(); }
  /// `subset` is a mask over the n features.
  double operator()(const PointVector& subset) const;

 private:
  PointFunction h_;
  PointVector query_;
  const BackgroundDataset* background_;
};

/// Hard cap for the 2^n enumeration.
inline constexpr std::size_t kBruteForceMaxN = 20;

/// Shapley values by enumerating all subsets:
///   phi_i = sum_{S not containing i} (v(S + i) - v(S)) / (n * C(n-1, |S|)).
/// Throws ResourceError above kBruteForceMaxN.
std::vector<double> exact_shap_bruteforce(const PointFunction& h, const PointVector& query,
                                          const BackgroundDataset& background);

enum class KernelShapMode { kSampled, kEnumerate };

struct KernelShapConfig {
  KernelShapMode mode = KernelShapMode::kSampled;
  /// Explicit sample count; when unset, round(sample_factor * (2n + 2048)).
  std::optional<std::size_t> num_subset_samples;
  double sample_factor = 1.0;
  bool paired_sampling = true;
  std::uint64_t rng_seed = 0;

  std::size_t effective_samples(std::size_t n) const;
};

struct KernelShapDiagnostics {
  std::size_t num_samples = 0;
  std::size_t distinct_subsets = 0;
  std::size_t retries = 0;
  double condition_estimate = 0.0;
  double v_empty = 0.0;
  double v_full = 0.0;
};

struct KernelShapResult {
  std::vector<double> phi;
  KernelShapDiagnostics diagnostics;
};

/// Constrained weighted least squares over coalitions 0 < |S| < n with the
/// Shapley kernel w(S) = (n - 1) / (C(n,|S|) |S| (n - |S|)), intercept fixed
/// to v(empty) and the coefficients summing to v(full) - v(empty).
///
/// kSampled follows the stock KernelSHAP budget split: size pairs (s, n - s)
/// are enumerated from the outside in with exact kernel weights while the
/// remaining budget covers them, so a budget of 2^n - 2 is exact. Leftover
/// budget draws sizes with probability proportional to (n-1)/(s(n-s)) among
/// the sizes not enumerated, then a uniform subset of that size; with paired
/// sampling every draw also adds its complement. kEnumerate uses every
/// coalition with its exact kernel weight and reproduces exact Shapley
/// values.
KernelShapResult kernel_shap(const PointFunction& h, const PointVector& query,
                             const BackgroundDataset& background,
                             const KernelShapConfig& config);

/// Returned by r2_vector when the truth has zero variance but the estimate
/// does not match it.
inline constexpr double kR2Undefined = -std::numeric_limits<double>::infinity();

/// 1 - SS_res / SS_tot.
double r2_vector(std::span<const double> estimate, std::span<const double> truth);

/// Exact binomial coefficient for small arguments (n <= 62).
std::uint64_t binomial(std::size_t n, std::size_t k);

struct IdentityCheck {
  std::size_t cases = 0;
  std::size_t failures = 0;
  // First failing (n, m, a), valid when failures > 0.
  std::size_t n = 0, m = 0, a = 0;
};

/// Double-counting identity behind the closed-form weight, in exact integer
/// arithmetic for every 1 <= n <= max_n, 0 <= a <= m <= n - 1:
///   sum_{b=0}^{n-m-1} C(a+b, a) C(n-a-b-1, m-a) == C(n, m+1).
IdentityCheck check_weight_identity(std::size_t max_n);

}  // namespace fshap
