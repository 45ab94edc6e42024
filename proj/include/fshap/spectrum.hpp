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
#include <span>
#include <unordered_map>
#include <vector>

#include "fshap/bits.hpp"

namespace fshap {

/// Coefficients with magnitude below this are treated as exact cancellation
/// and dropped after every transform.
inline constexpr double kZeroDropThreshold = 1e-15;

/// Largest dimension accepted by the dense transform by default.
inline constexpr std::size_t kDefaultDenseCap = 24;

struct SpectrumTerm {
  Frequency freq;
  double coef = 0.0;
};

/// Sparse pseudo-boolean function h(x) = sum_f c_f * (-1)^<f,x>.
///
/// Coefficients use the unnormalized +-1 basis. A coefficient of the
/// orthonormal basis 2^(-n/2) (-1)^<f,x> equals c_f * orthonormal_scale(n).
/// Terms are stored packed (term-major) in canonical frequency order, with no
/// zero coefficients and no duplicates.
class SparseSpectrum {
 public:
  SparseSpectrum() = default;
  explicit SparseSpectrum(std::size_t n);

  /// Throws DimensionError on mismatched frequencies and InvalidArgument on
  /// duplicates. Exact zeros are dropped.
  static SparseSpectrum from_terms(std::size_t n, std::vector<SpectrumTerm> terms);

  std::size_t n() const noexcept { return n_; }
  std::size_t num_words() const noexcept { return words_; }
  std::size_t support_size() const noexcept { return coefs_.size(); }
  bool empty() const noexcept { return coefs_.empty(); }
  std::size_t degree() const noexcept { return degree_; }

  std::span<const double> coefficients() const noexcept { return coefs_; }
  std::span<const std::uint64_t> masks() const noexcept { return masks_; }
  std::span<const std::uint64_t> mask(std::size_t t) const noexcept {
    return {masks_.data() + t * words_, words_};
  }
  std::size_t term_degree(std::size_t t) const noexcept;
  Frequency frequency(std::size_t t) const;
  std::vector<SpectrumTerm> terms() const;

  /// Coefficient of f, or 0 when f is outside the support.
  double coefficient_of(const Frequency& f) const;
  /// Sum of squared coefficients.
  double energy() const noexcept;

  friend bool operator==(const SparseSpectrum&, const SparseSpectrum&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::size_t degree_ = 0;
  std::vector<std::uint64_t> masks_;
  std::vector<double> coefs_;
};

/// Hash-indexed accumulation of terms; `build` canonicalizes.
class SpectrumAccumulator {
 public:
  explicit SpectrumAccumulator(std::size_t n) : n_(n) {}

  void add(const Frequency& f, double coef);
  void add(const SparseSpectrum& s, double scale = 1.0);
  std::size_t size() const noexcept { return terms_.size(); }
  std::size_t n() const noexcept { return n_; }

  SparseSpectrum build(double drop_below = kZeroDropThreshold) const;

 private:
  std::size_t n_;
  std::unordered_map<Frequency, double, FrequencyHash> terms_;
};

double evaluate(const SparseSpectrum& spectrum, const PointVector& x);

/// a * u + b * v, canonicalized.
SparseSpectrum linear_combination(const SparseSpectrum& u, double a, const SparseSpectrum& v,
                                  double b);

/// Truth-table ordering: entry `index` is the point whose feature j equals
/// bit (n - 1 - j) of index, so feature 0 is the most significant bit.
PointVector point_from_index(std::size_t n, std::uint64_t index);
std::uint64_t index_from_point(const PointVector& x);

/// Dense transform of a truth table of length 2^n in the ordering above:
/// c_f = 2^-n * sum_x h(x) (-1)^<f,x>. Throws InvalidArgument on a
/// non-power-of-two length and ResourceError when n exceeds max_n.
SparseSpectrum dense_wht(std::span<const double> values,
                         std::size_t max_n = kDefaultDenseCap);

/// Inverse of dense_wht: all 2^n values of the spectrum, same ordering.
std::vector<double> synthesize(const SparseSpectrum& spectrum,
                               std::size_t max_n = kDefaultDenseCap);

struct EnergyReport {
  double total_energy = 0.0;
  double kept_energy = 0.0;
  std::size_t dropped_count = 0;
};

struct PruneResult {
  SparseSpectrum spectrum;
  EnergyReport report;
};

/// Keeps the largest-magnitude terms until their energy reaches
/// energy_fraction of the total, plus every term with |c| >= min_amplitude.
/// A min_amplitude of 0 disables the guard.
/// Ties in |c| go to the canonically smaller frequency.
PruneResult prune(const SparseSpectrum& spectrum, double energy_fraction,
                  double min_amplitude);

/// Number of frequencies of degree <= d over n variables. Exact; throws
/// NumericError if the count does not fit in 64 bits.
std::uint64_t degree_support_count(std::size_t n, std::size_t d);

/// Every frequency of degree <= d over n variables, in canonical order.
/// Throws ResourceError when there are more than max_count of them.
std::vector<Frequency> low_degree_basis(std::size_t n, std::size_t d,
                                        std::size_t max_count = 1u << 22);

/// sqrt(2^n): converts unnormalized coefficients to the orthonormal basis.
double orthonormal_scale(std::size_t n);

/// Spectrum repacked word-major for vectorized evaluation.
class SpectrumEvaluator {
 public:
  explicit SpectrumEvaluator(const SparseSpectrum& spectrum);
  double operator()(const PointVector& x) const;
  std::size_t n() const noexcept { return n_; }

 private:
  std::size_t n_;
  std::size_t words_;
  std::size_t count_;
  std::vector<std::uint64_t> masks_soa_;
  std::vector<double> coefs_;
};

}  // namespace fshap
