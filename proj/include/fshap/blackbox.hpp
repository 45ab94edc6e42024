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

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fshap/bits.hpp"
#include "fshap/spectrum.hpp"
#include "fshap/tree.hpp"

namespace fshap {

/// Query access to a predictor on {0,1}^n. Copies share one query counter.
class QueryHandle {
 public:
  using Fn = std::function<double(const PointVector&)>;

  QueryHandle(std::size_t n, Fn fn, bool thread_safe = false);

  double operator()(const PointVector& x) const;
  std::size_t n() const noexcept { return n_; }
  bool thread_safe() const noexcept { return thread_safe_; }
  std::uint64_t query_count() const noexcept { return counter_->load(); }

 private:
  std::size_t n_;
  Fn fn_;
  bool thread_safe_;
  std::shared_ptr<std::atomic<std::uint64_t>> counter_;
};

QueryHandle handle_from_ensemble(TreeEnsemble ensemble);
QueryHandle handle_from_spectrum(SparseSpectrum spectrum);
/// CSV with a header, n bit columns and a final value column, covering every
/// point of the cube exactly once.
QueryHandle handle_from_truth_table(const std::filesystem::path& path);

/// Named synthetic generators:
///   "parity"                       (-1)^(x_0 + ... + x_{n-1})
///   "parity:0,3,5"                 parity over the listed features
///   "majority"                     1 when more than n/2 bits are set, else 0
///   "random-sparse:k=32,d=3,seed=7" k random frequencies of degree <= d
///                                   with coefficients uniform in [-1, 1]
QueryHandle handle_from_synthetic(const std::string& spec, std::size_t n);

/// The spectrum behind a "random-sparse" generator.
SparseSpectrum random_sparse_spectrum(std::size_t n, std::size_t k, std::size_t max_degree,
                                      std::uint64_t seed);

/// Queries all 2^n points once (in truth-table order) and returns the exact
/// spectrum. Queries run in parallel only when the handle is thread safe.
SparseSpectrum exhaustive_transform(const QueryHandle& handle,
                                    std::size_t max_n = kDefaultDenseCap, unsigned threads = 1);

enum class RecoveryMode { kExhaustive, kLowDegree };

struct RecoveryConfig {
  RecoveryMode mode = RecoveryMode::kLowDegree;
  std::size_t max_degree = 2;
  std::size_t num_samples = 0;  // 0 = 4 x the degree basis size
  double ridge = 1e-6;
  std::uint64_t rng_seed = 0;
  std::size_t top_k = 0;        // 0 keeps every fitted term
  unsigned threads = 1;
};

inline constexpr std::size_t kMaxRecoverySamples = 1'000'000;

struct RecoveryResult {
  SparseSpectrum spectrum;
  std::size_t queries = 0;
  std::size_t basis_size = 0;
  double condition_estimate = 0.0;
  double in_sample_r2 = 0.0;
  std::vector<std::string> warnings;
};

/// Ridge fit of h on the Walsh features of degree <= max_degree over uniform
/// samples, truncation to the top_k largest coefficients, then an
/// unregularized refit on the kept support.
RecoveryResult low_degree_recovery(const QueryHandle& handle, const RecoveryConfig& config);

/// Dispatches on config.mode.
RecoveryResult recover_spectrum(const QueryHandle& handle, const RecoveryConfig& config);

/// Uniform point number `index` of the sample stream keyed by seed.
PointVector sample_point(std::size_t n, std::uint64_t seed, std::uint64_t index);

/// R^2 between the handle and the spectrum on fresh uniform points.
double fidelity_r2(const QueryHandle& handle, const SparseSpectrum& spectrum,
                   std::size_t num_eval_samples, std::uint64_t rng_seed);

}  // namespace fshap
