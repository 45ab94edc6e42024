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

#include "fshap/oracles.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include "fshap/error.hpp"
#include "fshap/rng.hpp"

namespace fshap {

ValueFunction::ValueFunction(PointFunction h, PointVector query,
                             const BackgroundDataset& background)
    : h_(std::move(h)), query_(std::move(query)), background_(&background) {
  if (query_.size() != background.n()) {
    throw DimensionError("query and background dimensions differ");
  }
}

double ValueFunction::operator()(const PointVector& subset) const {
  if (subset.size() != query_.size()) throw DimensionError("subset mask dimension mismatch");
  const std::size_t words = query_.num_words();
  std::vector<std::uint64_t> mixed(words);
  double total = 0.0;
  for (const auto& x : background_->points()) {
    for (std::size_t w = 0; w < words; ++w) {
      const std::uint64_t s = subset.words()[w];
      mixed[w] = (query_.words()[w] & s) | (x.words()[w] & ~s);
    }
    total += h_(PointVector::from_words(query_.size(), mixed));
  }
  return total / static_cast<double>(background_->size());
}

std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  if (n > 62) throw InvalidArgument("binomial supports n <= 62");
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (std::size_t i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
  return static_cast<std::uint64_t>(c);
}

IdentityCheck check_weight_identity(std::size_t max_n) {
  IdentityCheck out;
  for (std::size_t n = 1; n <= max_n; ++n) {
    for (std::size_t m = 0; m < n; ++m) {
      for (std::size_t a = 0; a <= m; ++a) {
        std::uint64_t lhs = 0;
        for (std::size_t b = 0; b + m + 1 <= n; ++b) {
          lhs += binomial(a + b, a) * binomial(n - a - b - 1, m - a);
        }
        ++out.cases;
        if (lhs != binomial(n, m + 1) && out.failures++ == 0) {
          out.n = n;
          out.m = m;
          out.a = a;
        }
      }
    }
  }
  return out;
}

namespace {

PointVector subset_point(std::size_t n, std::uint64_t mask) {
  std::vector<std::uint64_t> w(word_count(n), 0);
  if (n > 0) w[0] = mask;
  return PointVector::from_words(n, std::move(w));
}

}  // namespace

std::vector<double> exact_shap_bruteforce(const PointFunction& h, const PointVector& query,
                                          const BackgroundDataset& background) {
  const std::size_t n = query.size();
  if (n > kBruteForceMaxN) {
    throw ResourceError("brute-force Shapley enumeration limited to n <= " +
                        std::to_string(kBruteForceMaxN));
  }
  if (n == 0) return {};
  const ValueFunction v(h, query, background);
  const std::uint64_t subsets = std::uint64_t{1} << n;
  std::vector<double> values(subsets);
  for (std::uint64_t s = 0; s < subsets; ++s) values[s] = v(subset_point(n, s));

  // Shapley weight |S|! (n-|S|-1)! / n! = 1 / (n C(n-1,|S|)); the integer
  // denominator is exact, so each weight is a correctly rounded rational.
  std::vector<double> weight(n);
  for (std::size_t s = 0; s < n; ++s) {
    weight[s] = 1.0 / static_cast<double>(n * binomial(n - 1, s));
  }
  std::vector<double> phi(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    double acc = 0.0;
    for (std::uint64_t s = 0; s < subsets; ++s) {
      if (s & bit) continue;
      acc += weight[static_cast<std::size_t>(std::popcount(s))] * (values[s | bit] - values[s]);
    }
    phi[i] = acc;
  }
  return phi;
}

// ---------------------------------------------------------------------------

std::size_t KernelShapConfig::effective_samples(std::size_t n) const {
  if (num_subset_samples) return *num_subset_samples;
  return static_cast<std::size_t>(
      std::llround(sample_factor * static_cast<double>(2 * n + 2048)));
}

namespace {

struct Design {
  std::vector<std::vector<std::uint8_t>> rows;  // coalition indicators
  std::vector<double> weights;
  std::size_t distinct = 0;
  std::size_t sampled_rows = 0;      // rows drawn at random (the rest are enumerated)
  std::size_t sampled_distinct = 0;
};

Design enumerate_design(std::size_t n) {
  if (n > kBruteForceMaxN) {
    throw ResourceError("KernelSHAP enumeration limited to n <= " +
                        std::to_string(kBruteForceMaxN));
  }
  Design d;
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  for (std::uint64_t s = 1; s < full; ++s) {
    const auto size = static_cast<std::size_t>(std::popcount(s));
    std::vector<std::uint8_t> z(n);
    for (std::size_t j = 0; j < n; ++j) z[j] = (s >> j) & 1u;
    d.rows.push_back(std::move(z));
    d.weights.push_back(static_cast<double>(n - 1) /
                        (static_cast<double>(binomial(n, size)) * static_cast<double>(size) *
                         static_cast<double>(n - size)));
  }
  d.distinct = d.rows.size();
  return d;
}

// C(n, k), saturating at SIZE_MAX.
std::size_t saturating_binomial(std::size_t n, std::size_t k) {
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (std::size_t j = 1; j <= k; ++j) {
    c = c * (n - k + j) / j;
    if (c > std::numeric_limits<std::size_t>::max()) return std::numeric_limits<std::size_t>::max();
  }
  return static_cast<std::size_t>(c);
}

void append_all_of_size(std::size_t n, std::size_t size, double weight, Design& d) {
  std::vector<std::size_t> idx(size);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (;;) {
    std::vector<std::uint8_t> z(n, 0);
    for (std::size_t j : idx) z[j] = 1;
    d.rows.push_back(std::move(z));
    d.weights.push_back(weight);
    std::size_t j = size;
    while (j > 0 && idx[j - 1] == n - size + j - 1) --j;
    if (j == 0) return;
    ++idx[j - 1];
    for (std::size_t t = j; t < size; ++t) idx[t] = idx[t - 1] + 1;
  }
}

// Sizes are taken in pairs (s, n - s) from the outside in. While the
// remaining budget covers every coalition of a pair, those coalitions enter
// with their exact kernel weight. The rest of the budget samples the
// remaining sizes with probability proportional to their kernel mass, then
// a uniform subset of that size, each row carrying an equal share of the
// remaining mass. A budget of 2^n - 2 or more is full enumeration.
Design sample_design(std::size_t n, std::size_t samples, bool paired, std::uint64_t seed,
                     std::uint64_t stream) {
  std::vector<double> mass(n, 0.0);  // kernel mass of each size
  double remaining_mass = 0.0;
  for (std::size_t s = 1; s < n; ++s) {
    mass[s] = static_cast<double>(n - 1) / (static_cast<double>(s) * static_cast<double>(n - s));
    remaining_mass += mass[s];
  }

  Design d;
  std::size_t budget = samples;
  std::size_t lo = 1, hi = n - 1;
  while (lo <= hi) {
    const std::size_t per_size = saturating_binomial(n, lo);
    if (per_size > budget) break;
    const std::size_t count = lo == hi ? per_size : 2 * per_size;
    if (count > budget) break;
    append_all_of_size(n, lo, mass[lo] / static_cast<double>(per_size), d);
    remaining_mass -= mass[lo];
    if (hi != lo) {
      append_all_of_size(n, hi, mass[hi] / static_cast<double>(per_size), d);
      remaining_mass -= mass[hi];
    }
    budget -= count;
    ++lo;
    --hi;
  }

  if (lo <= hi && budget > 0) {
    CounterRng rng(seed, stream);
    std::vector<double> cumulative;
    double total = 0.0;
    for (std::size_t s = lo; s <= hi; ++s) {
      total += mass[s];
      cumulative.push_back(total);
    }
    std::vector<std::size_t> perm(n);
    auto draw = [&] {
      const double u = rng.uniform() * total;
      const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      const std::size_t size =
          lo + std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), hi - lo);
      for (std::size_t j = 0; j < n; ++j) perm[j] = j;
      std::vector<std::uint8_t> z(n, 0);
      for (std::size_t j = 0; j < size; ++j) {
        const std::size_t pick = j + static_cast<std::size_t>(rng.below(n - j));
        std::swap(perm[j], perm[pick]);
        z[perm[j]] = 1;
      }
      return z;
    };
    const std::size_t first_sampled = d.rows.size();
    const std::size_t draws = paired ? budget / 2 : budget;
    for (std::size_t t = 0; t < draws; ++t) {
      auto z = draw();
      if (paired) {
        std::vector<std::uint8_t> comp(n);
        for (std::size_t j = 0; j < n; ++j) comp[j] = 1 - z[j];
        d.rows.push_back(std::move(z));
        d.rows.push_back(std::move(comp));
      } else {
        d.rows.push_back(std::move(z));
      }
    }
    if (paired && budget % 2 == 1) d.rows.push_back(draw());
    const double share = remaining_mass / static_cast<double>(d.rows.size() - first_sampled);
    d.weights.resize(d.rows.size(), share);
    d.sampled_rows = d.rows.size() - first_sampled;
    d.sampled_distinct =
        std::set<std::vector<std::uint8_t>>(d.rows.begin() + static_cast<std::ptrdiff_t>(first_sampled),
                                            d.rows.end())
            .size();
  }
  d.distinct = std::set<std::vector<std::uint8_t>>(d.rows.begin(), d.rows.end()).size();
  return d;
}

}  // namespace

KernelShapResult kernel_shap(const PointFunction& h, const PointVector& query,
                             const BackgroundDataset& background,
                             const KernelShapConfig& config) {
  const std::size_t n = query.size();
  if (n < 2) throw InvalidArgument("KernelSHAP needs at least two features");
  if (background.n() != n) throw DimensionError("query and background dimensions differ");
  if (config.mode == KernelShapMode::kSampled && config.effective_samples(n) == 0) {
    throw InvalidArgument("KernelSHAP needs a positive sample count");
  }

  const ValueFunction v(h, query, background);
  KernelShapResult result;
  auto& diag = result.diagnostics;
  diag.v_empty = v(PointVector(n));
  {
    std::vector<std::size_t> all(n);
    for (std::size_t j = 0; j < n; ++j) all[j] = j;
    diag.v_full = v(PointVector::from_indices(n, all));
  }
  const double delta = diag.v_full - diag.v_empty;

  Design design;
  if (config.mode == KernelShapMode::kEnumerate) {
    design = enumerate_design(n);
  } else {
    const std::size_t samples = config.effective_samples(n);
    constexpr std::size_t kMaxRetries = 3;
    for (;;) {
      design = sample_design(n, samples, config.paired_sampling, config.rng_seed, diag.retries);
      // Degenerate: every random draw landed on one coalition.
      if (design.sampled_rows <= 1 || design.sampled_distinct > 1) break;
      if (diag.retries == kMaxRetries) {
        throw NumericError("KernelSHAP design degenerate after " +
                           std::to_string(kMaxRetries) + " resamples");
      }
      ++diag.retries;
    }
  }
  diag.num_samples = design.rows.size();
  diag.distinct_subsets = design.distinct;

  // Eliminate the last coefficient through sum(beta) = delta:
  //   z . beta = sum_{i<n-1} (z_i - z_last) beta_i + z_last delta.
  const std::size_t m = n - 1;
  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                                 static_cast<Eigen::Index>(m));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  Eigen::VectorXd row(static_cast<Eigen::Index>(m));
  std::vector<std::size_t> on;
  for (std::size_t j = 0; j < design.rows.size(); ++j) {
    const auto& z = design.rows[j];
    on.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (z[i]) on.push_back(i);
    }
    const double target = v(PointVector::from_indices(n, on)) - diag.v_empty -
                          static_cast<double>(z[m]) * delta;
    for (std::size_t i = 0; i < m; ++i) {
      row[static_cast<Eigen::Index>(i)] = static_cast<double>(z[i]) - static_cast<double>(z[m]);
    }
    const double w = design.weights[j];
    normal.noalias() += w * row * row.transpose();
    rhs.noalias() += w * target * row;
  }
  const double jitter = 1e-10 * std::max(normal.trace() / static_cast<double>(m), 1e-300);
  normal.diagonal().array() += jitter;

  const Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
  if (ldlt.info() != Eigen::Success) throw NumericError("KernelSHAP normal equations failed");
  const double rcond = ldlt.rcond();
  diag.condition_estimate = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  const Eigen::VectorXd beta = ldlt.solve(rhs);

  result.phi.resize(n);
  double partial = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    result.phi[i] = beta[static_cast<Eigen::Index>(i)];
    partial += result.phi[i];
  }
  result.phi[m] = delta - partial;
  return result;
}

double r2_vector(std::span<const double> estimate, std::span<const double> truth) {
  if (estimate.size() != truth.size()) throw InvalidArgument("R^2 needs equal-length vectors");
  if (truth.size() < 2) throw InvalidArgument("R^2 needs at least two entries");
  double mean = 0.0;
  for (double t : truth) mean += t;
  mean /= static_cast<double>(truth.size());
  double ss_tot = 0.0;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
    ss_res += (estimate[i] - truth[i]) * (estimate[i] - truth[i]);
  }
  if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : kR2Undefined;
  return 1.0 - ss_res / ss_tot;
}

}  // namespace fshap
