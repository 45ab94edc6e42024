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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "fshap/error.hpp"
#include "fshap/oracles.hpp"
#include "test_util.hpp"

namespace fshap {
namespace {

using testing::Gen;

PointFunction as_fn(const SparseSpectrum& s) {
  return [s](const PointVector& x) { return testing::naive_eval(s, x); };
}

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

TEST(ValueFunctionTest, EndpointsMatchDefinitions) {
  Gen g(1);
  const auto s = g.spectrum(6, 20);
  const BackgroundDataset d(g.points(6, 7));
  const auto q = g.point(6);
  const ValueFunction v(as_fn(s), q, d);
  double mean = 0.0;
  for (const auto& x : d.points()) mean += testing::naive_eval(s, x);
  EXPECT_NEAR(v(PointVector(6)), mean / 7.0, 1e-12);
  EXPECT_NEAR(v(PointVector::from_bits({1, 1, 1, 1, 1, 1})), testing::naive_eval(s, q), 1e-12);
  EXPECT_THROW(v(PointVector(5)), DimensionError);
}

TEST(BruteForce, ConstantGivesZero) {
  Gen g(2);
  const BackgroundDataset d(g.points(5, 4));
  const auto phi = exact_shap_bruteforce([](const PointVector&) { return 4.2; }, g.point(5), d);
  EXPECT_EQ(phi, std::vector<double>(5, 0.0));
}

TEST(BruteForce, SingleBasisFunctionExample) {
  const auto s = SparseSpectrum::from_terms(2, {{Frequency::from_bits({1, 0}), 1.0}});
  const BackgroundDataset d({PointVector::from_bits({1, 0})});
  const auto phi = exact_shap_bruteforce(as_fn(s), PointVector::from_bits({0, 0}), d);
  EXPECT_NEAR(phi[0], 2.0, 1e-15);
  EXPECT_NEAR(phi[1], 0.0, 1e-15);
}

TEST(BruteForce, MatchesPermutationOracle) {
  Gen g(3);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 1 + g.below(6);
    const auto s = g.spectrum(n, 1 + g.below(20));
    const BackgroundDataset d(g.points(n, 1 + g.below(5)));
    const auto q = g.point(n);
    EXPECT_LE(testing::max_abs_diff(exact_shap_bruteforce(as_fn(s), q, d),
                                    testing::permutation_shapley(as_fn(s), q, d.points())),
              1e-12);
  }
}

TEST(BruteForce, Efficiency) {
  Gen g(4);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 1 + g.below(10);
    const auto s = g.spectrum(n, 1 + g.below(30));
    const BackgroundDataset d(g.points(n, 1 + g.below(8)));
    const auto q = g.point(n);
    const ValueFunction v(as_fn(s), q, d);
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    const double delta = v(PointVector::from_indices(n, all)) - v(PointVector(n));
    EXPECT_NEAR(sum(exact_shap_bruteforce(as_fn(s), q, d)), delta, 1e-10);
  }
}

TEST(BruteForce, RefusesLargeN) {
  const BackgroundDataset d({PointVector(21)});
  EXPECT_THROW(exact_shap_bruteforce([](const PointVector&) { return 0.0; }, PointVector(21), d),
               ResourceError);
}

TEST(KernelShap, EnumerationReproducesBruteForce) {
  Gen g(5);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 2 + g.below(9);
    const auto s = g.spectrum(n, 1 + g.below(40));
    const BackgroundDataset d(g.points(n, 1 + g.below(6)));
    const auto q = g.point(n);
    KernelShapConfig cfg;
    cfg.mode = KernelShapMode::kEnumerate;
    const auto r = kernel_shap(as_fn(s), q, d, cfg);
    EXPECT_LE(testing::max_abs_diff(r.phi, exact_shap_bruteforce(as_fn(s), q, d)), 1e-8) << n;
    EXPECT_EQ(r.diagnostics.num_samples, (std::size_t{1} << n) - 2);
  }
}

TEST(KernelShap, SampledEstimateSatisfiesEfficiencyConstraint) {
  Gen g(6);
  const auto s = g.spectrum(10, 32, 3);
  const BackgroundDataset d(g.points(10, 10));
  const auto q = g.point(10);
  KernelShapConfig cfg;
  cfg.sample_factor = 0.1;
  const auto r = kernel_shap(as_fn(s), q, d, cfg);
  EXPECT_NEAR(sum(r.phi), r.diagnostics.v_full - r.diagnostics.v_empty, 1e-10);
  EXPECT_EQ(r.diagnostics.num_samples, cfg.effective_samples(10));
  EXPECT_GT(r.diagnostics.condition_estimate, 0.0);
}

TEST(KernelShap, EffectiveSamples) {
  KernelShapConfig cfg;
  EXPECT_EQ(cfg.effective_samples(10), 2068u);
  cfg.sample_factor = 0.02;
  EXPECT_EQ(cfg.effective_samples(10), 41u);  // round(41.36)
  cfg.sample_factor = 2.0;
  EXPECT_EQ(cfg.effective_samples(10), 4136u);
  cfg.num_subset_samples = 17;
  EXPECT_EQ(cfg.effective_samples(10), 17u);
}

TEST(KernelShap, SameSeedSameResult) {
  Gen g(7);
  const auto s = g.spectrum(8, 20);
  const BackgroundDataset d(g.points(8, 5));
  const auto q = g.point(8);
  KernelShapConfig cfg;
  cfg.sample_factor = 0.05;
  cfg.rng_seed = 99;
  EXPECT_EQ(kernel_shap(as_fn(s), q, d, cfg).phi, kernel_shap(as_fn(s), q, d, cfg).phi);
  auto other = cfg;
  other.rng_seed = 100;
  EXPECT_NE(kernel_shap(as_fn(s), q, d, cfg).phi, kernel_shap(as_fn(s), q, d, other).phi);
}

TEST(KernelShap, PairedSamplingLowersVariance) {
  Gen g(8);
  const std::size_t n = 10;
  const auto s = g.spectrum(n, 32, 3);
  const BackgroundDataset d(g.points(n, 10));
  const auto q = g.point(n);
  const auto exact = exact_shap_bruteforce(as_fn(s), q, d);
  auto mse = [&](bool paired) {
    double acc = 0.0;
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
      KernelShapConfig cfg;
      cfg.num_subset_samples = 200;
      cfg.paired_sampling = paired;
      cfg.rng_seed = rep;
      const auto r = kernel_shap(as_fn(s), q, d, cfg);
      for (std::size_t i = 0; i < n; ++i) acc += (r.phi[i] - exact[i]) * (r.phi[i] - exact[i]);
    }
    return acc / 100.0;
  };
  const double paired = mse(true), unpaired = mse(false);
  EXPECT_LT(paired, unpaired) << "paired " << paired << " unpaired " << unpaired;
}

TEST(KernelShap, ConvergesWithSampleFactor) {
  Gen g(9);
  const std::size_t n = 10;
  const auto s = g.spectrum(n, 32, 3);
  const BackgroundDataset d(g.points(n, 10));
  const auto q = g.point(n);
  const auto exact = exact_shap_bruteforce(as_fn(s), q, d);
  double prev = -std::numeric_limits<double>::infinity();
  for (double factor : {0.02, 0.2, 2.0}) {
    double mean_r2 = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      KernelShapConfig cfg;
      cfg.sample_factor = factor;
      cfg.rng_seed = seed;
      mean_r2 += r2_vector(kernel_shap(as_fn(s), q, d, cfg).phi, exact) / 20.0;
    }
    EXPECT_GE(mean_r2, prev) << "factor " << factor;
    prev = mean_r2;
  }
  EXPECT_GE(prev, 0.99);
}

// With n = 3 unpaired and two draws, both draws hit the same coalition with
// probability 1/6, so some seeds resample and a few exhaust the retries.
TEST(KernelShap, DegenerateDesignsResampleThenFail) {
  const BackgroundDataset d({PointVector::from_bits({1, 1, 1})});
  const auto q = PointVector::from_bits({0, 0, 0});
  auto h = [](const PointVector& x) { return x.test(0) ? 1.0 : 0.0; };
  std::size_t resampled = 0, failed = 0;
  for (std::uint64_t seed = 0; seed < 20000; ++seed) {
    KernelShapConfig cfg;
    cfg.num_subset_samples = 2;
    cfg.paired_sampling = false;
    cfg.rng_seed = seed;
    try {
      const auto r = kernel_shap(h, q, d, cfg);
      EXPECT_LE(r.diagnostics.retries, 3u);
      if (r.diagnostics.retries > 0) ++resampled;
    } catch (const NumericError&) {
      ++failed;
    }
  }
  EXPECT_GT(resampled, 0u);
  EXPECT_GT(failed, 0u);
}

TEST(KernelShap, BudgetCoveringAllCoalitionsIsExact) {
  Gen g(10);
  for (std::size_t n : {3u, 6u, 10u}) {
    const auto s = g.spectrum(n, 30);
    const BackgroundDataset d(g.points(n, 5));
    const auto q = g.point(n);
    KernelShapConfig cfg;
    cfg.num_subset_samples = (std::size_t{1} << n) - 2;
    const auto r = kernel_shap(as_fn(s), q, d, cfg);
    EXPECT_LE(testing::max_abs_diff(r.phi, exact_shap_bruteforce(as_fn(s), q, d)), 1e-8) << n;
    EXPECT_EQ(r.diagnostics.distinct_subsets, (std::size_t{1} << n) - 2);
  }
}

TEST(KernelShap, SmallSizesEnumeratedBeforeSampling) {
  Gen g(11);
  const auto s = g.spectrum(10, 30);
  const BackgroundDataset d(g.points(10, 5));
  const auto q = g.point(10);
  KernelShapConfig cfg;
  cfg.num_subset_samples = 150;  // sizes 1, 9, 2, 8 take 110 rows
  const auto r = kernel_shap(as_fn(s), q, d, cfg);
  EXPECT_EQ(r.diagnostics.num_samples, 150u);
  EXPECT_GE(r.diagnostics.distinct_subsets, 110u);
}

TEST(KernelShap, Errors) {
  const BackgroundDataset d1({PointVector(1)});
  KernelShapConfig cfg;
  EXPECT_THROW(kernel_shap([](const PointVector&) { return 0.0; }, PointVector(1), d1, cfg),
               InvalidArgument);
  const BackgroundDataset d3({PointVector(3)});
  EXPECT_THROW(kernel_shap([](const PointVector&) { return 0.0; }, PointVector(4), d3, cfg),
               DimensionError);
}

TEST(R2, Examples) {
  const std::vector<double> t{1, 2, 3};
  EXPECT_EQ(r2_vector(t, t), 1.0);
  EXPECT_EQ(r2_vector(std::vector<double>{2, 2, 2}, t), 0.0);
  EXPECT_DOUBLE_EQ(r2_vector(std::vector<double>{1, 2, 4}, t), 0.5);
  const std::vector<double> flat{3, 3};
  EXPECT_EQ(r2_vector(flat, flat), 1.0);
  EXPECT_EQ(r2_vector(std::vector<double>{3, 4}, flat), kR2Undefined);
  EXPECT_THROW(r2_vector(std::vector<double>{1}, std::vector<double>{1}), InvalidArgument);
  EXPECT_THROW(r2_vector(t, flat), InvalidArgument);
}

TEST(Binomial, SmallValues) {
  EXPECT_EQ(binomial(5, 2), 10u);
  EXPECT_EQ(binomial(12, 6), 924u);
  EXPECT_EQ(binomial(4, 5), 0u);
  EXPECT_EQ(binomial(62, 31), 465428353255261088u);
}

TEST(WeightIdentity, HoldsUpToTwelve) {
  const auto r = check_weight_identity(12);
  EXPECT_EQ(r.failures, 0u);
  EXPECT_EQ(r.cases, 364u);  // sum over n of n(n+1)/2
}

}  // namespace
}  // namespace fshap
