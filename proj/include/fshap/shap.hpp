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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "fshap/bits.hpp"
#include "fshap/simd/kernels.hpp"
#include "fshap/spectrum.hpp"

namespace fshap {

/// Empirical marginal for interventional SHAP. Rows keep their order and
/// duplicates are allowed (they weight the marginal).
class BackgroundDataset {
 public:
  explicit BackgroundDataset(std::vector<PointVector> points, std::vector<double> labels = {});

  std::size_t n() const noexcept { return n_; }
  std::size_t size() const noexcept { return points_.size(); }
  const std::vector<PointVector>& points() const noexcept { return points_; }
  const PointVector& operator[](std::size_t r) const { return points_[r]; }
  std::span<const double> labels() const noexcept { return labels_; }

 private:
  std::size_t n_ = 0;
  std::vector<PointVector> points_;
  std::vector<double> labels_;
};

struct ShapResult {
  PointVector query;
  std::vector<double> attributions;
  double base_value = 0.0;  // mean prediction over the background
  double prediction = 0.0;

  double sum_phi() const noexcept;
  /// sum_phi - (prediction - base_value); zero up to rounding.
  double efficiency_residual() const noexcept;
};

enum class Variant { kBase, kPrecompute, kSparse, kPositional };

inline constexpr std::array<Variant, 4> kAllVariants{Variant::kBase, Variant::kPrecompute,
                                                     Variant::kSparse, Variant::kPositional};

std::string_view variant_name(Variant v) noexcept;
Variant parse_variant(std::string_view name);

/// Parity weight of an A-set of size m: ((m + 1) mod 2) / (m + 1), i.e.
/// 1, 0, 1/3, 0, 1/5, ... for m = 0..max_a.
std::vector<double> weight_table(std::size_t max_a);

/// SHAP value of feature i for the single basis function (-1)^<f,x>,
/// evaluated directly from the per-row A-set formula.
double shap_single_frequency(const Frequency& f, std::size_t i, const PointVector& query,
                             const BackgroundDataset& background);

/// Frequencies are reduced in chunks of this many terms; chunk partials are
/// combined in chunk order.
inline constexpr std::size_t kFrequencyChunk = 1024;

struct ExplainOptions {
  Variant variant = Variant::kPrecompute;
  /// Workers inside one explain() call (across frequency chunks) or across
  /// queries in explain_batch(). 0 = available parallelism.
  unsigned threads = 1;
  /// Kernel table to use; nullptr selects the process-wide active table.
  const simd::KernelTable* kernels = nullptr;
  /// Replaces weight_table(n) when non-empty. Test hook for negative
  /// controls; must cover at least n entries.
  std::vector<double> weight_override;
};

/// Closed-form interventional SHAP for a sparse spectrum against a fixed
/// background:
///
///   phi_i = -2/|D| sum_f c_f f_i sum_{x in D} [x_i != q_i] (-1)^<f,x> w(|A|)
///
/// with A = {j != i : x_j != q_j, f_j = 1}. Everything that depends only on
/// (spectrum, background) is prepared once at construction and reused for
/// every query. Cost per query is Theta(n |D| k) for kBase; the other
/// variants skip coordinates outside each frequency's support.
///
/// Variants:
///  - kBase: literal triple loop over (i, f, x), scalar only; the reference.
///  - kPrecompute: caches (-1)^<f,x> per (f, x); per query computes the
///    weighted A-set term once per (f, x) and reduces it per coordinate.
///  - kSparse: computes terms on the fly and visits only i with f_i = 1.
///  - kPositional: maps each coordinate to the frequencies containing it and
///    restricts each coordinate's sum to the background rows where x_i != q_i.
///
/// Results are invariant under thread count bit for bit. Variants agree to
/// rounding (about 1e-15 relative).
class Explainer {
 public:
  Explainer(SparseSpectrum spectrum, BackgroundDataset background, ExplainOptions options = {});

  ShapResult explain(const PointVector& query) const;
  /// Parallel across queries; each element equals explain(queries[j]).
  /// Errors are rethrown with the failing query index attached.
  std::vector<ShapResult> explain_batch(std::span<const PointVector> queries) const;

  double base_value() const noexcept { return base_value_; }
  const SparseSpectrum& spectrum() const noexcept { return spectrum_; }
  const BackgroundDataset& background() const noexcept { return background_; }
  const ExplainOptions& options() const noexcept { return options_; }

 private:
  struct QueryScratch;

  ShapResult explain_with(const PointVector& query, unsigned threads) const;
  std::vector<double> attributions(const PointVector& query, unsigned threads) const;
  void chunk_base(std::size_t chunk, const QueryScratch& q, std::span<double> out) const;
  void chunk_precompute(std::size_t chunk, const QueryScratch& q, std::span<double> out) const;
  void chunk_sparse(std::size_t chunk, const QueryScratch& q, std::span<double> out) const;
  void chunk_positional(std::size_t chunk, const QueryScratch& q, std::span<double> out) const;

  SparseSpectrum spectrum_;
  BackgroundDataset background_;
  ExplainOptions options_;
  const simd::KernelTable* kernels_;

  std::size_t n_;
  std::size_t words_;
  std::size_t rows_;
  std::size_t terms_;
  std::size_t chunks_;
  double base_value_ = 0.0;

  std::vector<std::uint64_t> rows_soa_;     // background, word-major
  std::vector<double> weight_by_count_;     // indexed by |A| + 1 (0 unused)
  std::vector<std::uint8_t> sign_cache_;    // kPrecompute: [term * rows + r]
  std::vector<std::vector<std::uint32_t>> coordinate_terms_;  // kPositional
};

ShapResult shap_values(const SparseSpectrum& spectrum, const PointVector& query,
                       const BackgroundDataset& background, Variant variant = Variant::kPrecompute);

std::vector<ShapResult> batch_explain(const SparseSpectrum& spectrum,
                                      std::span<const PointVector> queries,
                                      const BackgroundDataset& background,
                                      Variant variant = Variant::kPrecompute,
                                      unsigned threads = 1);

}  // namespace fshap
