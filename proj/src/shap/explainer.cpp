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

#include <algorithm>
#include <string>

#include "fshap/error.hpp"
#include "fshap/parallel.hpp"
#include "fshap/shap.hpp"

namespace fshap {

BackgroundDataset::BackgroundDataset(std::vector<PointVector> points, std::vector<double> labels)
    : points_(std::move(points)), labels_(std::move(labels)) {
  if (points_.empty()) throw InvalidArgument("background dataset must not be empty");
  n_ = points_.front().size();
  for (std::size_t r = 0; r < points_.size(); ++r) {
    if (points_[r].size() != n_) {
      throw DimensionError("background row " + std::to_string(r) + " has dimension " +
                           std::to_string(points_[r].size()) + ", expected " +
                           std::to_string(n_));
    }
  }
  if (!labels_.empty() && labels_.size() != points_.size()) {
    throw InvalidArgument("background labels must match the row count");
  }
}

double ShapResult::sum_phi() const noexcept {
  double s = 0.0;
  for (double v : attributions) s += v;
  return s;
}

double ShapResult::efficiency_residual() const noexcept {
  return sum_phi() - (prediction - base_value);
}

std::string_view variant_name(Variant v) noexcept {
  switch (v) {
    case Variant::kBase:
      return "base";
    case Variant::kPrecompute:
      return "precompute";
    case Variant::kSparse:
      return "sparse";
    case Variant::kPositional:
      return "positional";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  for (auto v : kAllVariants) {
    if (variant_name(v) == name) return v;
  }
  throw InvalidArgument("unknown variant '" + std::string(name) +
                        "' (expected base, precompute, sparse or positional)");
}

std::vector<double> weight_table(std::size_t max_a) {
  std::vector<double> table(max_a + 1);
  for (std::size_t m = 0; m <= max_a; ++m) {
    table[m] = (m + 1) % 2 == 0 ? 0.0 : 1.0 / static_cast<double>(m + 1);
  }
  return table;
}

double shap_single_frequency(const Frequency& f, std::size_t i, const PointVector& query,
                             const BackgroundDataset& background) {
  const std::size_t n = background.n();
  if (f.size() != n || query.size() != n) {
    throw DimensionError("frequency, query and background must share n");
  }
  if (i >= n) throw InvalidArgument("feature index out of range");
  if (!f.test(i)) return 0.0;

  const auto weights = weight_table(n);
  double sum = 0.0;
  std::vector<std::uint64_t> diff(f.num_words());
  for (const auto& x : background.points()) {
    if (x.test(i) == query.test(i)) continue;
    for (std::size_t w = 0; w < diff.size(); ++w) diff[w] = x.words()[w] ^ query.words()[w];
    const std::size_t a_size = popcount_and(f.words(), diff) - 1;  // i itself excluded
    sum += walsh_sign(f.words(), x.words()) * weights[a_size];
  }
  return -2.0 / static_cast<double>(background.size()) * sum + 0.0;
}

// ---------------------------------------------------------------------------

struct Explainer::QueryScratch {
  std::vector<std::uint64_t> diff_soa;  // x_r XOR q, word-major
  // kPositional: rows with x_i != q_i, compacted per coordinate.
  std::vector<std::vector<std::uint64_t>> sub_x;
  std::vector<std::vector<std::uint64_t>> sub_d;
  std::vector<std::size_t> sub_rows;
};

Explainer::Explainer(SparseSpectrum spectrum, BackgroundDataset background,
                     ExplainOptions options)
    : spectrum_(std::move(spectrum)),
      background_(std::move(background)),
      options_(std::move(options)),
      kernels_(options_.kernels ? options_.kernels : &simd::active_kernels()),
      n_(spectrum_.n()),
      words_(spectrum_.num_words()),
      rows_(background_.size()),
      terms_(spectrum_.support_size()),
      chunks_((terms_ + kFrequencyChunk - 1) / kFrequencyChunk) {
  if (background_.n() != n_) {
    throw DimensionError("background has dimension " + std::to_string(background_.n()) +
                         " but the spectrum is over n=" + std::to_string(n_));
  }

  rows_soa_.resize(words_ * rows_);
  double total = 0.0;
  for (std::size_t r = 0; r < rows_; ++r) {
    const auto& x = background_[r];
    for (std::size_t w = 0; w < words_; ++w) rows_soa_[w * rows_ + r] = x.words()[w];
    total += evaluate(spectrum_, x);
  }
  base_value_ = total / static_cast<double>(rows_);

  const auto table = options_.weight_override.empty() ? weight_table(n_ == 0 ? 0 : n_ - 1)
                                                      : options_.weight_override;
  if (n_ > 0 && table.size() < n_) throw InvalidArgument("weight override shorter than n");
  weight_by_count_.assign(n_ + 1, 0.0);
  for (std::size_t a = 1; a <= n_; ++a) weight_by_count_[a] = table[a - 1];

  if (options_.variant == Variant::kPrecompute) {
    const unsigned __int128 cells = static_cast<unsigned __int128>(terms_) * rows_;
    if (cells > (std::uint64_t{1} << 31)) {
      throw ResourceError("sign cache of " + std::to_string(terms_) + " x " +
                          std::to_string(rows_) + " entries exceeds the memory guard");
    }
    sign_cache_.resize(terms_ * rows_);
    for (std::size_t t = 0; t < terms_; ++t) {
      kernels_->parity_signs(spectrum_.mask(t).data(), words_, rows_soa_.data(), rows_, rows_,
                             sign_cache_.data() + t * rows_);
    }
  }
  if (options_.variant == Variant::kPositional) {
    coordinate_terms_.resize(n_);
    for (std::size_t t = 0; t < terms_; ++t) {
      for (std::size_t w = 0; w < words_; ++w) {
        std::uint64_t word = spectrum_.mask(t)[w];
        while (word) {
          const auto i = w * kWordBits + static_cast<std::size_t>(std::countr_zero(word));
          coordinate_terms_[i].push_back(static_cast<std::uint32_t>(t));
          word &= word - 1;
        }
      }
    }
  }
}

void Explainer::chunk_base(std::size_t chunk, const QueryScratch& q,
                           std::span<double> out) const {
  const std::size_t begin = chunk * kFrequencyChunk;
  const std::size_t end = std::min(terms_, begin + kFrequencyChunk);
  const auto coefs = spectrum_.coefficients();
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t wi = i / kWordBits;
    const unsigned bi = i % kWordBits;
    double phi = 0.0;
    for (std::size_t t = begin; t < end; ++t) {
      const auto f = spectrum_.mask(t);
      const double fi = static_cast<double>((f[wi] >> bi) & 1u);
      double acc = 0.0;
      for (std::size_t r = 0; r < rows_; ++r) {
        unsigned pc_d = 0;
        unsigned pc_x = 0;
        for (std::size_t w = 0; w < words_; ++w) {
          pc_d += static_cast<unsigned>(std::popcount(f[w] & q.diff_soa[w * rows_ + r]));
          pc_x += static_cast<unsigned>(std::popcount(f[w] & rows_soa_[w * rows_ + r]));
        }
        const double di = static_cast<double>((q.diff_soa[wi * rows_ + r] >> bi) & 1u);
        const double sign = (pc_x & 1u) ? -1.0 : 1.0;
        acc += fi * di * sign * weight_by_count_[pc_d];
      }
      phi += coefs[t] * acc;
    }
    out[i] = phi;
  }
}

void Explainer::chunk_precompute(std::size_t chunk, const QueryScratch& q,
                                 std::span<double> out) const {
  const std::size_t begin = chunk * kFrequencyChunk;
  const std::size_t end = std::min(terms_, begin + kFrequencyChunk);
  const auto coefs = spectrum_.coefficients();
  std::vector<double> term(rows_);
  for (std::size_t t = begin; t < end; ++t) {
    const auto f = spectrum_.mask(t);
    kernels_->cached_row_terms(f.data(), words_, q.diff_soa.data(), rows_, rows_,
                               sign_cache_.data() + t * rows_, weight_by_count_.data(),
                               term.data());
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t wi = i / kWordBits;
      const unsigned bi = i % kWordBits;
      if (!((f[wi] >> bi) & 1u)) continue;
      out[i] += coefs[t] * kernels_->masked_sum(term.data(), q.diff_soa.data() + wi * rows_, bi,
                                                rows_);
    }
  }
}

void Explainer::chunk_sparse(std::size_t chunk, const QueryScratch& q,
                             std::span<double> out) const {
  const std::size_t begin = chunk * kFrequencyChunk;
  const std::size_t end = std::min(terms_, begin + kFrequencyChunk);
  const auto coefs = spectrum_.coefficients();
  std::vector<double> term(rows_);
  for (std::size_t t = begin; t < end; ++t) {
    const auto f = spectrum_.mask(t);
    kernels_->row_terms(f.data(), words_, rows_soa_.data(), q.diff_soa.data(), rows_, rows_,
                        weight_by_count_.data(), term.data());
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t word = f[w];
      while (word) {
        const auto bi = static_cast<unsigned>(std::countr_zero(word));
        out[w * kWordBits + bi] +=
            coefs[t] * kernels_->masked_sum(term.data(), q.diff_soa.data() + w * rows_, bi, rows_);
        word &= word - 1;
      }
    }
  }
}

void Explainer::chunk_positional(std::size_t chunk, const QueryScratch& q,
                                 std::span<double> out) const {
  const auto begin = static_cast<std::uint32_t>(chunk * kFrequencyChunk);
  const auto end = static_cast<std::uint32_t>(std::min(terms_, chunk * kFrequencyChunk + kFrequencyChunk));
  const auto coefs = spectrum_.coefficients();
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t rows = q.sub_rows[i];
    if (rows == 0) continue;
    const auto& list = coordinate_terms_[i];
    auto it = std::lower_bound(list.begin(), list.end(), begin);
    double phi = 0.0;
    for (; it != list.end() && *it < end; ++it) {
      phi += coefs[*it] * kernels_->row_terms_sum(spectrum_.mask(*it).data(), words_,
                                                  q.sub_x[i].data(), q.sub_d[i].data(), rows,
                                                  rows, weight_by_count_.data());
    }
    out[i] = phi;
  }
}

std::vector<double> Explainer::attributions(const PointVector& query, unsigned threads) const {
  QueryScratch q;
  q.diff_soa.resize(words_ * rows_);
  for (std::size_t w = 0; w < words_; ++w) {
    const std::uint64_t qw = query.words()[w];
    for (std::size_t r = 0; r < rows_; ++r) {
      q.diff_soa[w * rows_ + r] = rows_soa_[w * rows_ + r] ^ qw;
    }
  }
  if (options_.variant == Variant::kPositional) {
    q.sub_x.resize(n_);
    q.sub_d.resize(n_);
    q.sub_rows.assign(n_, 0);
    std::vector<std::size_t> picked;
    for (std::size_t i = 0; i < n_; ++i) {
      if (coordinate_terms_[i].empty()) continue;
      const std::size_t wi = i / kWordBits;
      const unsigned bi = i % kWordBits;
      picked.clear();
      for (std::size_t r = 0; r < rows_; ++r) {
        if ((q.diff_soa[wi * rows_ + r] >> bi) & 1u) picked.push_back(r);
      }
      const std::size_t m = picked.size();
      q.sub_rows[i] = m;
      q.sub_x[i].resize(words_ * m);
      q.sub_d[i].resize(words_ * m);
      for (std::size_t w = 0; w < words_; ++w) {
        for (std::size_t p = 0; p < m; ++p) {
          q.sub_x[i][w * m + p] = rows_soa_[w * rows_ + picked[p]];
          q.sub_d[i][w * m + p] = q.diff_soa[w * rows_ + picked[p]];
        }
      }
    }
  }

  std::vector<std::vector<double>> partial(chunks_, std::vector<double>(n_, 0.0));
  parallel_for(chunks_, threads, [&](std::size_t c) {
    switch (options_.variant) {
      case Variant::kBase:
        chunk_base(c, q, partial[c]);
        break;
      case Variant::kPrecompute:
        chunk_precompute(c, q, partial[c]);
        break;
      case Variant::kSparse:
        chunk_sparse(c, q, partial[c]);
        break;
      case Variant::kPositional:
        chunk_positional(c, q, partial[c]);
        break;
    }
  });

  const double scale = -2.0 / static_cast<double>(rows_);
  std::vector<double> phi(n_, 0.0);
  for (std::size_t c = 0; c < chunks_; ++c) {
    for (std::size_t i = 0; i < n_; ++i) phi[i] += partial[c][i];
  }
  for (double& v : phi) v = v * scale + 0.0;  // + 0.0 maps -0 to 0
  return phi;
}

ShapResult Explainer::explain(const PointVector& query) const {
  return explain_with(query, options_.threads);
}

ShapResult Explainer::explain_with(const PointVector& query, unsigned threads) const {
  if (query.size() != n_) {
    throw DimensionError("query has dimension " + std::to_string(query.size()) +
                         " but the spectrum is over n=" + std::to_string(n_));
  }
  ShapResult result;
  result.query = query;
  result.attributions = attributions(query, threads);
  result.base_value = base_value_;
  result.prediction = evaluate(spectrum_, query);
  return result;
}

std::vector<ShapResult> Explainer::explain_batch(std::span<const PointVector> queries) const {
  for (std::size_t j = 0; j < queries.size(); ++j) {
    if (queries[j].size() != n_) {
      throw DimensionError("query " + std::to_string(j) + ": dimension " +
                           std::to_string(queries[j].size()) + " but the spectrum is over n=" +
                           std::to_string(n_));
    }
  }
  // Each query runs its chunks serially; chunk partials are combined in the
  // same order as explain(), so the results match bit for bit.
  std::vector<ShapResult> out(queries.size());
  parallel_for(queries.size(), options_.threads, [&](std::size_t j) {
    try {
      out[j] = explain_with(queries[j], 1);
    } catch (const Error& e) {
      throw Error("query " + std::to_string(j) + ": " + e.what());
    }
  });
  return out;
}

ShapResult shap_values(const SparseSpectrum& spectrum, const PointVector& query,
                       const BackgroundDataset& background, Variant variant) {
  ExplainOptions opts;
  opts.variant = variant;
  return Explainer(spectrum, background, opts).explain(query);
}

std::vector<ShapResult> batch_explain(const SparseSpectrum& spectrum,
                                      std::span<const PointVector> queries,
                                      const BackgroundDataset& background, Variant variant,
                                      unsigned threads) {
  ExplainOptions opts;
  opts.variant = variant;
  opts.threads = threads;
  return Explainer(spectrum, background, opts).explain_batch(queries);
}

}  // namespace fshap
