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

#include "fshap/spectrum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fshap/error.hpp"
#include "fshap/simd/kernels.hpp"

namespace fshap {
namespace {

std::uint64_t reverse_low_bits(std::uint64_t v, std::size_t n) {
  std::uint64_t r = 0;
  for (std::size_t j = 0; j < n; ++j) {
    r |= ((v >> j) & 1u) << (n - 1 - j);
  }
  return r;
}

}  // namespace

SparseSpectrum::SparseSpectrum(std::size_t n) : n_(n), words_(word_count(n)) {}

SparseSpectrum SparseSpectrum::from_terms(std::size_t n, std::vector<SpectrumTerm> terms) {
  const std::size_t words = word_count(n);
  for (const auto& t : terms) {
    if (t.freq.size() != n) {
      throw DimensionError("frequency of length " + std::to_string(t.freq.size()) +
                           " in a spectrum over n=" + std::to_string(n));
    }
    if (!std::isfinite(t.coef)) throw InvalidArgument("non-finite spectrum coefficient");
  }
  std::sort(terms.begin(), terms.end(),
            [](const SpectrumTerm& a, const SpectrumTerm& b) { return a.freq < b.freq; });
  SparseSpectrum s(n);
  s.masks_.reserve(terms.size() * words);
  s.coefs_.reserve(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i > 0 && terms[i].freq == terms[i - 1].freq) {
      throw InvalidArgument("duplicate frequency {" + terms[i].freq.to_string() + "}");
    }
    if (terms[i].coef == 0.0) continue;
    const auto w = terms[i].freq.words();
    s.masks_.insert(s.masks_.end(), w.begin(), w.end());
    s.coefs_.push_back(terms[i].coef);
    s.degree_ = std::max(s.degree_, terms[i].freq.degree());
  }
  return s;
}

std::size_t SparseSpectrum::term_degree(std::size_t t) const noexcept {
  std::size_t c = 0;
  for (auto w : mask(t)) c += std::popcount(w);
  return c;
}

Frequency SparseSpectrum::frequency(std::size_t t) const {
  const auto m = mask(t);
  return Frequency::from_words(n_, std::vector<std::uint64_t>(m.begin(), m.end()));
}

std::vector<SpectrumTerm> SparseSpectrum::terms() const {
  std::vector<SpectrumTerm> out;
  out.reserve(support_size());
  for (std::size_t t = 0; t < support_size(); ++t) out.push_back({frequency(t), coefs_[t]});
  return out;
}

double SparseSpectrum::coefficient_of(const Frequency& f) const {
  if (f.size() != n_) throw DimensionError("frequency dimension mismatch");
  std::size_t lo = 0;
  std::size_t hi = support_size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    const auto c = compare_masks(mask(mid), f.words());
    if (c == 0) return coefs_[mid];
    if (c < 0) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return 0.0;
}

double SparseSpectrum::energy() const noexcept {
  double e = 0.0;
  for (double c : coefs_) e += c * c;
  return e;
}

// ---------------------------------------------------------------------------

void SpectrumAccumulator::add(const Frequency& f, double coef) {
  if (f.size() != n_) throw DimensionError("frequency dimension mismatch in accumulator");
  terms_[f] += coef;
}

void SpectrumAccumulator::add(const SparseSpectrum& s, double scale) {
  if (s.n() != n_) throw DimensionError("spectrum dimension mismatch in accumulator");
  for (std::size_t t = 0; t < s.support_size(); ++t) {
    terms_[s.frequency(t)] += scale * s.coefficients()[t];
  }
}

SparseSpectrum SpectrumAccumulator::build(double drop_below) const {
  std::vector<SpectrumTerm> kept;
  kept.reserve(terms_.size());
  for (const auto& [f, c] : terms_) {
    if (std::abs(c) >= drop_below && c != 0.0) kept.push_back({f, c});
  }
  return SparseSpectrum::from_terms(n_, std::move(kept));
}

// ---------------------------------------------------------------------------

double evaluate(const SparseSpectrum& spectrum, const PointVector& x) {
  if (x.size() != spectrum.n()) {
    throw DimensionError("point of dimension " + std::to_string(x.size()) +
                         " evaluated on a spectrum over n=" + std::to_string(spectrum.n()));
  }
  const auto coefs = spectrum.coefficients();
  double acc = 0.0;
  for (std::size_t t = 0; t < coefs.size(); ++t) {
    acc += walsh_sign(spectrum.mask(t), x.words()) * coefs[t];
  }
  return acc;
}

SparseSpectrum linear_combination(const SparseSpectrum& u, double a, const SparseSpectrum& v,
                                  double b) {
  if (u.n() != v.n()) throw DimensionError("linear combination of spectra over different n");
  SpectrumAccumulator acc(u.n());
  acc.add(u, a);
  acc.add(v, b);
  return acc.build();
}

PointVector point_from_index(std::size_t n, std::uint64_t index) {
  if (n > 64) throw InvalidArgument("truth-table indexing supports n <= 64");
  std::vector<std::uint64_t> w(word_count(n), 0);
  if (n > 0) w[0] = reverse_low_bits(index, n);
  return PointVector::from_words(n, std::move(w));
}

std::uint64_t index_from_point(const PointVector& x) {
  if (x.size() > 64) throw InvalidArgument("truth-table indexing supports n <= 64");
  return x.size() == 0 ? 0 : reverse_low_bits(x.words()[0], x.size());
}

SparseSpectrum dense_wht(std::span<const double> values, std::size_t max_n) {
  const std::size_t len = values.size();
  if (len == 0 || !std::has_single_bit(len)) {
    throw InvalidArgument("dense transform needs a power-of-two length, got " +
                          std::to_string(len));
  }
  const auto n = static_cast<std::size_t>(std::countr_zero(len));
  if (n > max_n) {
    throw ResourceError("dense transform over n=" + std::to_string(n) +
                        " exceeds the cap of " + std::to_string(max_n));
  }
  std::vector<double> data(values.begin(), values.end());
  simd::active_kernels().fwht(data.data(), len);
  const double scale = std::ldexp(1.0, -static_cast<int>(n));

  std::vector<SpectrumTerm> terms;
  for (std::size_t g = 0; g < len; ++g) {
    const double c = data[g] * scale;
    if (std::abs(c) < kZeroDropThreshold) continue;
    std::vector<std::uint64_t> w(word_count(n), 0);
    if (n > 0) w[0] = reverse_low_bits(g, n);
    terms.push_back({Frequency::from_words(n, std::move(w)), c});
  }
  return SparseSpectrum::from_terms(n, std::move(terms));
}

std::vector<double> synthesize(const SparseSpectrum& spectrum, std::size_t max_n) {
  const std::size_t n = spectrum.n();
  if (n > max_n) {
    throw ResourceError("synthesis over n=" + std::to_string(n) + " exceeds the cap of " +
                        std::to_string(max_n));
  }
  const std::size_t len = std::size_t{1} << n;
  std::vector<double> data(len, 0.0);
  for (std::size_t t = 0; t < spectrum.support_size(); ++t) {
    const std::uint64_t m = n == 0 ? 0 : spectrum.mask(t)[0];
    data[reverse_low_bits(m, n)] = spectrum.coefficients()[t];
  }
  simd::active_kernels().fwht(data.data(), len);
  return data;
}

// ---------------------------------------------------------------------------

PruneResult prune(const SparseSpectrum& spectrum, double energy_fraction,
                  double min_amplitude) {
  if (!(energy_fraction > 0.0 && energy_fraction <= 1.0)) {
    throw InvalidArgument("energy_fraction must lie in (0, 1]");
  }
  if (!(min_amplitude >= 0.0)) throw InvalidArgument("min_amplitude must be >= 0");

  const auto coefs = spectrum.coefficients();
  const std::size_t k = coefs.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Terms are already canonical, so a stable sort settles ties by frequency.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(coefs[a]) > std::abs(coefs[b]);
  });

  PruneResult result;
  result.report.total_energy = spectrum.energy();
  const double target = energy_fraction * result.report.total_energy;
  std::vector<bool> keep(k, false);
  double cumulative = 0.0;
  for (std::size_t idx : order) {
    if (cumulative < target || energy_fraction == 1.0) {
      keep[idx] = true;
      cumulative += coefs[idx] * coefs[idx];
    }
    if (min_amplitude > 0.0 && std::abs(coefs[idx]) >= min_amplitude) keep[idx] = true;
  }

  std::vector<SpectrumTerm> kept;
  for (std::size_t t = 0; t < k; ++t) {
    if (keep[t]) {
      kept.push_back({spectrum.frequency(t), coefs[t]});
      result.report.kept_energy += coefs[t] * coefs[t];
    } else {
      ++result.report.dropped_count;
    }
  }
  result.spectrum = SparseSpectrum::from_terms(spectrum.n(), std::move(kept));
  return result;
}

std::uint64_t degree_support_count(std::size_t n, std::size_t d) {
  if (d > n) throw InvalidArgument("degree exceeds dimension");
  unsigned __int128 binom = 1;
  unsigned __int128 total = 0;
  for (std::size_t i = 0; i <= d; ++i) {
    total += binom;
    binom = binom * (n - i) / (i + 1);
  }
  if (total > std::numeric_limits<std::uint64_t>::max()) {
    throw NumericError("degree support count overflows 64 bits");
  }
  return static_cast<std::uint64_t>(total);
}

std::vector<Frequency> low_degree_basis(std::size_t n, std::size_t d, std::size_t max_count) {
  if (d > n) throw InvalidArgument("degree exceeds dimension");
  std::uint64_t count = 0;
  try {
    count = degree_support_count(n, d);
  } catch (const NumericError&) {
    count = std::numeric_limits<std::uint64_t>::max();
  }
  if (count > max_count) {
    throw ResourceError("degree-" + std::to_string(d) + " basis over n=" + std::to_string(n) +
                        " has more than " + std::to_string(max_count) + " frequencies");
  }
  std::vector<Frequency> basis;
  basis.reserve(static_cast<std::size_t>(count));
  std::vector<std::size_t> idx;
  for (std::size_t deg = 0; deg <= d; ++deg) {
    // Subsets of size deg in lexicographic order of their index lists.
    idx.resize(deg);
    for (std::size_t j = 0; j < deg; ++j) idx[j] = j;
    for (;;) {
      basis.push_back(Frequency::from_indices(n, idx));
      std::size_t j = deg;
      while (j > 0 && idx[j - 1] == n - deg + (j - 1)) --j;
      if (j == 0) break;
      ++idx[j - 1];
      for (std::size_t l = j; l < deg; ++l) idx[l] = idx[l - 1] + 1;
    }
  }
  return basis;
}

double orthonormal_scale(std::size_t n) {
  return std::sqrt(std::ldexp(1.0, static_cast<int>(n)));
}

// ---------------------------------------------------------------------------

SpectrumEvaluator::SpectrumEvaluator(const SparseSpectrum& spectrum)
    : n_(spectrum.n()),
      words_(spectrum.num_words()),
      count_(spectrum.support_size()),
      masks_soa_(words_ * count_),
      coefs_(spectrum.coefficients().begin(), spectrum.coefficients().end()) {
  for (std::size_t t = 0; t < count_; ++t) {
    const auto m = spectrum.mask(t);
    for (std::size_t w = 0; w < words_; ++w) masks_soa_[w * count_ + t] = m[w];
  }
}

double SpectrumEvaluator::operator()(const PointVector& x) const {
  if (x.size() != n_) throw DimensionError("point dimension mismatch in evaluator");
  return simd::active_kernels().walsh_sum(masks_soa_.data(), words_, count_, count_,
                                          x.words().data(), coefs_.data());
}

}  // namespace fshap
