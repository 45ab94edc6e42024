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

#include "fshap/blackbox.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "fshap/csv.hpp"
#include "fshap/error.hpp"
#include "fshap/oracles.hpp"
#include "fshap/parallel.hpp"
#include "fshap/rng.hpp"

namespace fshap {

QueryHandle::QueryHandle(std::size_t n, Fn fn, bool thread_safe)
    : n_(n),
      fn_(std::move(fn)),
      thread_safe_(thread_safe),
      counter_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
  if (!fn_) throw InvalidArgument("query handle needs a callable");
}

double QueryHandle::operator()(const PointVector& x) const {
  if (x.size() != n_) {
    throw DimensionError("query of dimension " + std::to_string(x.size()) +
                         " sent to a handle over n=" + std::to_string(n_));
  }
  counter_->fetch_add(1, std::memory_order_relaxed);
  return fn_(x);
}

QueryHandle handle_from_ensemble(TreeEnsemble ensemble) {
  const std::size_t n = ensemble.n_features();
  auto model = std::make_shared<const TreeEnsemble>(std::move(ensemble));
  return QueryHandle(n, [model](const PointVector& x) { return model->predict(x); }, true);
}

QueryHandle handle_from_spectrum(SparseSpectrum spectrum) {
  const std::size_t n = spectrum.n();
  auto s = std::make_shared<const SparseSpectrum>(std::move(spectrum));
  return QueryHandle(n, [s](const PointVector& x) { return evaluate(*s, x); }, true);
}

QueryHandle handle_from_truth_table(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  if (table.header.size() < 2) {
    throw SchemaError(path.string() + ":line 1", "truth table needs bit columns and a value");
  }
  const std::size_t n = table.header.size() - 1;
  if (n > kDefaultDenseCap) {
    throw ResourceError("truth table over n=" + std::to_string(n) + " exceeds the cap");
  }
  const std::size_t len = std::size_t{1} << n;
  if (table.rows.size() != len) {
    throw SchemaError(path.string(), "truth table has " + std::to_string(table.rows.size()) +
                                         " rows, expected 2^" + std::to_string(n));
  }
  auto values = std::make_shared<std::vector<double>>(len, 0.0);
  std::vector<std::uint8_t> seen(len, 0);
  std::vector<std::uint8_t> bits(n);
  for (const auto& row : table.rows) {
    const std::string where = path.string() + ":line " + std::to_string(row.line);
    for (std::size_t j = 0; j < n; ++j) {
      if (row.cells[j] != "0" && row.cells[j] != "1") {
        throw SchemaError(where, "bit column '" + table.header[j] + "' must be 0 or 1");
      }
      bits[j] = row.cells[j] == "1";
    }
    double v = 0.0;
    const auto& cell = row.cells[n];
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
      throw SchemaError(where, "malformed value '" + cell + "'");
    }
    const auto idx = index_from_point(PointVector::from_bits(bits));
    if (seen[idx]++) throw SchemaError(where, "duplicate point in truth table");
    (*values)[idx] = v;
  }
  return QueryHandle(
      n, [values](const PointVector& x) { return (*values)[index_from_point(x)]; }, true);
}

SparseSpectrum random_sparse_spectrum(std::size_t n, std::size_t k, std::size_t max_degree,
                                      std::uint64_t seed) {
  max_degree = std::min(max_degree, n);
  std::uint64_t available = 0;
  try {
    available = degree_support_count(n, max_degree);
  } catch (const NumericError&) {
    available = std::numeric_limits<std::uint64_t>::max();
  }
  if (k > available) {
    throw InvalidArgument("cannot draw " + std::to_string(k) + " distinct frequencies of degree <= " +
                          std::to_string(max_degree) + " over n=" + std::to_string(n));
  }
  CounterRng rng(seed, 0x5eed);
  std::vector<Frequency> chosen;
  if (4 * k >= available) {
    auto basis = low_degree_basis(n, max_degree);
    for (std::size_t j = 0; j < k; ++j) {
      std::swap(basis[j], basis[j + rng.below(basis.size() - j)]);
    }
    chosen.assign(basis.begin(), basis.begin() + static_cast<std::ptrdiff_t>(k));
  } else {
    std::set<Frequency> picked;
    std::vector<std::size_t> perm(n);
    while (picked.size() < k) {
      const auto deg = static_cast<std::size_t>(rng.below(max_degree + 1));
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      for (std::size_t j = 0; j < deg; ++j) std::swap(perm[j], perm[j + rng.below(n - j)]);
      picked.insert(Frequency::from_indices(
          n, std::span<const std::size_t>(perm.data(), deg)));
    }
    chosen.assign(picked.begin(), picked.end());
  }
  std::vector<SpectrumTerm> terms;
  for (auto& f : chosen) {
    double c = 0.0;
    while (c == 0.0) c = rng.uniform(-1.0, 1.0);
    terms.push_back({std::move(f), c});
  }
  return SparseSpectrum::from_terms(n, std::move(terms));
}

namespace {

std::map<std::string, std::string> parse_params(const std::string& text,
                                                const std::string& spec) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InvalidArgument("malformed generator '" + spec + "'");
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

std::uint64_t to_u64(const std::string& s, const std::string& spec) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidArgument("malformed number '" + s + "' in generator '" + spec + "'");
  }
  return v;
}

}  // namespace

QueryHandle handle_from_synthetic(const std::string& spec, std::size_t n) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (name == "parity") {
    std::vector<std::size_t> idx;
    if (args.empty()) {
      idx.resize(n);
      std::iota(idx.begin(), idx.end(), std::size_t{0});
    } else {
      std::stringstream ss(args);
      std::string item;
      while (std::getline(ss, item, ',')) idx.push_back(to_u64(item, spec));
    }
    auto f = std::make_shared<const Frequency>(Frequency::from_indices(n, idx));
    return QueryHandle(
        n, [f](const PointVector& x) { return static_cast<double>(walsh_sign(f->words(), x.words())); },
        true);
  }
  if (name == "majority") {
    return QueryHandle(
        n, [n](const PointVector& x) { return 2 * x.popcount() > n ? 1.0 : 0.0; }, true);
  }
  if (name == "random-sparse") {
    const auto p = parse_params(args, spec);
    auto get = [&](const char* key, std::uint64_t fallback) {
      auto it = p.find(key);
      return it == p.end() ? fallback : to_u64(it->second, spec);
    };
    return handle_from_spectrum(random_sparse_spectrum(n, get("k", 32), get("d", 3), get("seed", 0)));
  }
  throw InvalidArgument("unknown synthetic generator '" + spec +
                        "' (expected parity, majority or random-sparse)");
}

// ---------------------------------------------------------------------------

SparseSpectrum exhaustive_transform(const QueryHandle& handle, std::size_t max_n,
                                    unsigned threads) {
  const std::size_t n = handle.n();
  if (n > max_n) {
    throw ResourceError("exhaustive transform over n=" + std::to_string(n) +
                        " exceeds the query budget of 2^" + std::to_string(max_n));
  }
  const std::size_t len = std::size_t{1} << n;
  std::vector<double> values(len);
  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (len + kBlock - 1) / kBlock;
  parallel_for(blocks, handle.thread_safe() ? threads : 1, [&](std::size_t b) {
    const std::size_t end = std::min(len, (b + 1) * kBlock);
    for (std::size_t idx = b * kBlock; idx < end; ++idx) {
      values[idx] = handle(point_from_index(n, idx));
    }
  });
  return dense_wht(values, max_n);
}

PointVector sample_point(std::size_t n, std::uint64_t seed, std::uint64_t index) {
  const std::size_t words = word_count(n);
  const std::uint64_t key = derive_key(seed, 0xb1ac6b0c5ull);
  std::vector<std::uint64_t> w(words);
  for (std::size_t j = 0; j < words; ++j) w[j] = counter_word(key, index * words + j);
  if (n % kWordBits != 0 && words > 0) w.back() &= (std::uint64_t{1} << (n % kWordBits)) - 1;
  return PointVector::from_words(n, std::move(w));
}

RecoveryResult low_degree_recovery(const QueryHandle& handle, const RecoveryConfig& config) {
  const std::size_t n = handle.n();
  const std::size_t d = std::min(config.max_degree, n);
  if (config.ridge < 0.0) throw InvalidArgument("ridge penalty must be >= 0");

  RecoveryResult result;
  const auto basis = low_degree_basis(n, d);
  const std::size_t p = basis.size();
  result.basis_size = p;
  const std::size_t samples = config.num_samples ? config.num_samples : 4 * p;
  if (samples > kMaxRecoverySamples) {
    throw ResourceError("low-degree recovery limited to " + std::to_string(kMaxRecoverySamples) +
                        " samples");
  }
  if (samples < 2 * p) {
    result.warnings.push_back("only " + std::to_string(samples) + " samples for a basis of " +
                              std::to_string(p) + " (recommended >= " +
                              std::to_string(2 * p) + ")");
  }

  const auto rows = static_cast<Eigen::Index>(samples);
  const auto cols = static_cast<Eigen::Index>(p);
  Eigen::MatrixXd design(rows, cols);
  Eigen::VectorXd y(rows);
  std::vector<PointVector> points(samples);
  parallel_for(samples, handle.thread_safe() ? config.threads : 1, [&](std::size_t s) {
    points[s] = sample_point(n, config.rng_seed, s);
    y[static_cast<Eigen::Index>(s)] = handle(points[s]);
  });
  result.queries = samples;
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t j = 0; j < p; ++j) {
      design(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(j)) =
          walsh_sign(basis[j].words(), points[s].words());
    }
  }

  Eigen::MatrixXd normal = design.transpose() * design;
  normal.diagonal().array() += config.ridge;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
  const double rcond = ldlt.rcond();
  result.condition_estimate = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (ldlt.info() != Eigen::Success || !(result.condition_estimate < 1e12)) {
    result.warnings.push_back("ill-conditioned fit (condition estimate " +
                              std::to_string(result.condition_estimate) + ")");
  }
  const Eigen::VectorXd ridge_coef = ldlt.solve(design.transpose() * y);

  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(ridge_coef[static_cast<Eigen::Index>(a)]) >
           std::abs(ridge_coef[static_cast<Eigen::Index>(b)]);
  });
  const std::size_t keep = config.top_k ? std::min(config.top_k, p) : p;
  std::vector<std::size_t> kept(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep));
  std::sort(kept.begin(), kept.end());
  if (samples < keep) {
    result.warnings.push_back("refit is underdetermined (" + std::to_string(samples) +
                              " samples for " + std::to_string(keep) + " terms)");
  }

  Eigen::MatrixXd reduced(rows, static_cast<Eigen::Index>(keep));
  for (std::size_t j = 0; j < keep; ++j) {
    reduced.col(static_cast<Eigen::Index>(j)) = design.col(static_cast<Eigen::Index>(kept[j]));
  }
  const Eigen::VectorXd coef = reduced.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd fitted = reduced * coef;
  result.in_sample_r2 = r2_vector(std::span<const double>(fitted.data(), samples),
                                  std::span<const double>(y.data(), samples));

  std::vector<SpectrumTerm> terms;
  for (std::size_t j = 0; j < keep; ++j) {
    const double c = coef[static_cast<Eigen::Index>(j)];
    if (std::abs(c) >= kZeroDropThreshold) terms.push_back({basis[kept[j]], c});
  }
  result.spectrum = SparseSpectrum::from_terms(n, std::move(terms));
  return result;
}

RecoveryResult recover_spectrum(const QueryHandle& handle, const RecoveryConfig& config) {
  if (config.mode == RecoveryMode::kLowDegree) return low_degree_recovery(handle, config);
  RecoveryResult result;
  const auto before = handle.query_count();
  result.spectrum = exhaustive_transform(handle, kDefaultDenseCap, config.threads);
  result.queries = handle.query_count() - before;
  result.basis_size = std::size_t{1} << handle.n();
  result.condition_estimate = 1.0;
  result.in_sample_r2 = 1.0;
  return result;
}

double fidelity_r2(const QueryHandle& handle, const SparseSpectrum& spectrum,
                   std::size_t num_eval_samples, std::uint64_t rng_seed) {
  if (num_eval_samples < 2) throw InvalidArgument("fidelity needs at least two samples");
  if (spectrum.n() != handle.n()) throw DimensionError("spectrum and handle dimensions differ");
  const SpectrumEvaluator eval(spectrum);
  std::vector<double> truth(num_eval_samples);
  std::vector<double> approx(num_eval_samples);
  const std::uint64_t seed = mix64(rng_seed ^ 0xf1de11e7ull);
  for (std::size_t s = 0; s < num_eval_samples; ++s) {
    const auto x = sample_point(handle.n(), seed, s);
    truth[s] = handle(x);
    approx[s] = eval(x);
  }
  return r2_vector(approx, truth);
}

}  // namespace fshap
