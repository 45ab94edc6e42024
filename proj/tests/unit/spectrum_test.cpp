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
#include "fshap/spectrum.hpp"
#include "test_util.hpp"

namespace fshap {
namespace {

using testing::Gen;

SparseSpectrum single(std::size_t n, std::initializer_list<std::size_t> idx, double c) {
  return SparseSpectrum::from_terms(n, {{Frequency::from_indices(n, idx), c}});
}

std::vector<double> random_values(Gen& g, std::size_t n) {
  std::vector<double> v(std::size_t{1} << n);
  for (auto& x : v) x = g.uniform(-3.0, 3.0);
  return v;
}

TEST(Evaluate, ConstantFunction) {
  const auto s = single(5, {}, 3.5);
  Gen g(1);
  for (int t = 0; t < 10; ++t) EXPECT_EQ(evaluate(s, g.point(5)), 3.5);
}

TEST(Evaluate, SingleParityTerm) {
  EXPECT_EQ(evaluate(single(2, {0}, 1.0), PointVector::from_bits({1, 0})), -1.0);
}

TEST(Evaluate, TwoTerms) {
  const auto s = SparseSpectrum::from_terms(
      2, {{Frequency::from_bits({1, 1}), 2.0}, {Frequency::from_bits({0, 0}), 1.0}});
  EXPECT_EQ(evaluate(s, PointVector::from_bits({1, 0})), -1.0);
}

TEST(Evaluate, DimensionMismatchThrows) {
  EXPECT_THROW(evaluate(single(3, {0}, 1.0), PointVector(4)), DimensionError);
}

TEST(Evaluate, MatchesNaiveAndEvaluator) {
  Gen g(2);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + g.below(140);
    const auto s = g.spectrum(n, 1 + g.below(40));
    const SpectrumEvaluator fast(s);
    for (int r = 0; r < 5; ++r) {
      const auto x = g.point(n);
      const double want = testing::naive_eval(s, x);
      EXPECT_NEAR(evaluate(s, x), want, 1e-12);
      EXPECT_NEAR(fast(x), want, 1e-12);
    }
  }
}

TEST(SparseSpectrumTest, CanonicalizesTerms) {
  const std::size_t n = 3;
  const auto s = SparseSpectrum::from_terms(n, {{Frequency::from_indices(n, {1, 2}), 1.0},
                                                {Frequency::from_indices(n, {0}), 2.0},
                                                {Frequency::from_indices(n, {2}), 0.0},
                                                {Frequency(n), 3.0}});
  ASSERT_EQ(s.support_size(), 3u);
  EXPECT_EQ(s.frequency(0), Frequency(n));
  EXPECT_EQ(s.frequency(1), Frequency::from_indices(n, {0}));
  EXPECT_EQ(s.frequency(2), Frequency::from_indices(n, {1, 2}));
  EXPECT_EQ(s.degree(), 2u);
  EXPECT_EQ(s.coefficient_of(Frequency::from_indices(n, {2})), 0.0);
  EXPECT_EQ(s.energy(), 14.0);
}

TEST(SparseSpectrumTest, RejectsDuplicatesAndMismatch) {
  EXPECT_THROW(SparseSpectrum::from_terms(2, {{Frequency::from_bits({1, 0}), 1.0},
                                              {Frequency::from_bits({1, 0}), 2.0}}),
               InvalidArgument);
  EXPECT_THROW(SparseSpectrum::from_terms(2, {{Frequency(3), 1.0}}), DimensionError);
}

TEST(Accumulator, DropsCancellation) {
  SpectrumAccumulator acc(4);
  const auto f = Frequency::from_indices(4, {1});
  acc.add(f, 0.5);
  acc.add(f, -0.5);
  acc.add(Frequency(4), 1.0);
  const auto s = acc.build();
  EXPECT_EQ(s.support_size(), 1u);
  EXPECT_EQ(s.coefficient_of(Frequency(4)), 1.0);
}

TEST(DenseWht, ConstantSequence) {
  const std::vector<double> v(8, 5.0);
  const auto s = dense_wht(v);
  ASSERT_EQ(s.n(), 3u);
  ASSERT_EQ(s.support_size(), 1u);
  EXPECT_EQ(s.frequency(0), Frequency(3));
  EXPECT_EQ(s.coefficients()[0], 5.0);
}

TEST(DenseWht, PureBasisFunctionWithFeatureZeroMostSignificant) {
  const std::vector<double> v{1, 1, -1, -1};
  const auto s = dense_wht(v);
  ASSERT_EQ(s.support_size(), 1u);
  EXPECT_EQ(s.frequency(0), Frequency::from_bits({1, 0}));
  EXPECT_EQ(s.coefficients()[0], 1.0);
}

TEST(DenseWht, TruthTableOrdering) {
  EXPECT_EQ(point_from_index(3, 0b100), PointVector::from_bits({1, 0, 0}));
  EXPECT_EQ(point_from_index(3, 0b001), PointVector::from_bits({0, 0, 1}));
  for (std::uint64_t i = 0; i < 64; ++i) EXPECT_EQ(index_from_point(point_from_index(6, i)), i);
}

TEST(DenseWht, RejectsBadLengths) {
  const std::vector<double> three(3, 1.0);
  EXPECT_THROW(dense_wht(three), InvalidArgument);
  const std::vector<double> big(std::size_t{1} << 5, 1.0);
  EXPECT_THROW(dense_wht(big, 4), ResourceError);
}

TEST(DenseWht, RandomLengthEightRoundTrip) {
  Gen g(8);
  const auto v = random_values(g, 3);
  const auto s = dense_wht(v);
  for (std::uint64_t i = 0; i < 8; ++i) EXPECT_NEAR(evaluate(s, point_from_index(3, i)), v[i], 1e-12);
}

TEST(DenseWht, RoundTripPropertyUpToTen) {
  Gen g(9);
  for (std::size_t n = 0; n <= 10; ++n) {
    for (int rep = 0; rep < 3; ++rep) {
      const auto v = random_values(g, n);
      const auto s = dense_wht(v);
      double worst = 0.0;
      for (std::uint64_t i = 0; i < v.size(); ++i) {
        worst = std::max(worst, std::abs(evaluate(s, point_from_index(n, i)) - v[i]));
      }
      EXPECT_LE(worst, 1e-12) << "n=" << n;
      const auto back = synthesize(s);
      EXPECT_LE(testing::max_abs_diff(back, v), 1e-12);
    }
  }
}

TEST(DenseWht, Parseval) {
  Gen g(10);
  for (std::size_t n = 1; n <= 10; ++n) {
    const auto v = random_values(g, n);
    double lhs = 0.0;
    for (double x : v) lhs += x * x;
    const double rhs = std::ldexp(dense_wht(v).energy(), static_cast<int>(n));
    EXPECT_NEAR(lhs, rhs, 1e-9 * lhs) << "n=" << n;
  }
}

TEST(DenseWht, Linearity) {
  Gen g(12);
  for (std::size_t n = 1; n <= 8; ++n) {
    const auto u = random_values(g, n);
    const auto v = random_values(g, n);
    const double a = g.uniform(-2, 2), b = g.uniform(-2, 2);
    std::vector<double> w(u.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = a * u[i] + b * v[i];
    const auto lhs = dense_wht(w);
    const auto rhs = linear_combination(dense_wht(u), a, dense_wht(v), b);
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
      const auto f = Frequency::from_words(n, {m});
      EXPECT_NEAR(lhs.coefficient_of(f), rhs.coefficient_of(f), 1e-12);
    }
  }
}

// A sum of functions each reading only the variables in S_i has its support
// inside the union of the subset lattices of the S_i.
TEST(DenseWht, SupportOfLocalSumsStaysInSubsetLattices) {
  Gen g(13);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 4 + g.below(6);
    const std::size_t p = 1 + g.below(4);
    std::vector<std::uint64_t> sets;
    std::vector<std::vector<double>> tables;
    for (std::size_t i = 0; i < p; ++i) {
      std::uint64_t s = 0;
      const std::size_t width = 1 + g.below(3);
      for (std::size_t j = 0; j < width; ++j) s |= std::uint64_t{1} << g.below(n);
      sets.push_back(s);
      std::vector<double> t(std::size_t{1} << n);
      for (auto& x : t) x = g.uniform(-1, 1);
      tables.push_back(std::move(t));
    }
    std::vector<double> h(std::size_t{1} << n, 0.0);
    for (std::uint64_t idx = 0; idx < h.size(); ++idx) {
      const auto x = point_from_index(n, idx);
      for (std::size_t i = 0; i < p; ++i) {
        h[idx] += tables[i][x.words()[0] & sets[i]];  // depends on x restricted to S_i
      }
    }
    const auto s = dense_wht(h);
    for (std::size_t t = 0; t < s.support_size(); ++t) {
      const auto m = s.mask(t)[0];
      bool inside = false;
      for (auto set : sets) inside |= (m & ~set) == 0;
      EXPECT_TRUE(inside) << "frequency " << s.frequency(t).to_string();
    }
  }
}

TEST(DegreeSupportCount, Examples) {
  EXPECT_EQ(degree_support_count(10, 2), 56u);
  EXPECT_EQ(degree_support_count(13, 3), 378u);
  for (std::size_t n = 0; n <= 63; ++n) EXPECT_EQ(degree_support_count(n, n), std::uint64_t{1} << n);
  EXPECT_THROW(degree_support_count(64, 64), NumericError);
  EXPECT_THROW(degree_support_count(3, 4), InvalidArgument);
}

TEST(DegreeSupportCount, BoundsEverySpectrumOfThatDegree) {
  Gen g(14);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 2 + g.below(7);
    const std::size_t d = g.below(n + 1);
    auto v = random_values(g, n);
    // Low-pass the random function so it has degree <= d.
    auto full = dense_wht(v);
    std::vector<SpectrumTerm> low;
    for (auto& t : full.terms()) {
      if (t.freq.degree() <= d) low.push_back(t);
    }
    const auto s = SparseSpectrum::from_terms(n, std::move(low));
    EXPECT_LE(s.degree(), d);
    EXPECT_LE(s.support_size(), degree_support_count(n, d));
  }
}

TEST(LowDegreeBasis, CanonicalAndComplete) {
  const auto b = low_degree_basis(6, 2);
  EXPECT_EQ(b.size(), 22u);
  EXPECT_TRUE(std::is_sorted(b.begin(), b.end()));
  EXPECT_EQ(b.front(), Frequency(6));
  EXPECT_EQ(b.back(), Frequency::from_indices(6, {4, 5}));
  EXPECT_THROW(low_degree_basis(30, 3, 1000), ResourceError);
}

TEST(Prune, FullFractionIsIdentity) {
  Gen g(15);
  const auto s = g.spectrum(8, 30);
  const auto r = prune(s, 1.0, 0.005);
  EXPECT_EQ(r.spectrum, s);
  EXPECT_EQ(r.report.dropped_count, 0u);
  EXPECT_DOUBLE_EQ(r.report.kept_energy, r.report.total_energy);
}

TEST(Prune, DropsTinyTerm) {
  const std::size_t n = 2;
  const auto f1 = Frequency::from_indices(n, {0});
  const auto f2 = Frequency::from_indices(n, {1});
  const auto s = SparseSpectrum::from_terms(n, {{f1, 3.0}, {f2, 0.001}});
  const auto r = prune(s, 0.9995, 0.005);
  EXPECT_EQ(r.spectrum.support_size(), 1u);
  EXPECT_EQ(r.spectrum.coefficient_of(f1), 3.0);
  EXPECT_EQ(r.report.dropped_count, 1u);
}

TEST(Prune, MinAmplitudeGuardKeepsTerm) {
  const std::size_t n = 2;
  const auto s = SparseSpectrum::from_terms(
      n, {{Frequency::from_indices(n, {0}), 3.0}, {Frequency::from_indices(n, {1}), 0.01}});
  for (double frac : {0.1, 0.5, 0.9995}) {
    EXPECT_EQ(prune(s, frac, 0.005).spectrum.support_size(), 2u);
  }
}

TEST(Prune, TiesGoToCanonicallySmallerFrequency) {
  const std::size_t n = 3;
  const auto s = SparseSpectrum::from_terms(n, {{Frequency::from_indices(n, {2}), 1.0},
                                                {Frequency::from_indices(n, {0}), 1.0}});
  const auto r = prune(s, 0.5, 2.0);
  ASSERT_EQ(r.spectrum.support_size(), 1u);
  EXPECT_EQ(r.spectrum.frequency(0), Frequency::from_indices(n, {0}));
}

TEST(Prune, ReportInvariants) {
  Gen g(16);
  for (int rep = 0; rep < 50; ++rep) {
    const auto s = g.spectrum(7, 1 + g.below(40));
    const double frac = 0.05 + 0.95 * g.uniform();
    const auto r = prune(s, frac, g.uniform(0.0, 0.8));
    EXPECT_GE(r.report.kept_energy, 0.0);
    EXPECT_LE(r.report.kept_energy, r.report.total_energy * (1 + 1e-15));
    EXPECT_GE(r.report.kept_energy, frac * r.report.total_energy * (1 - 1e-12));
    EXPECT_EQ(r.spectrum.support_size() + r.report.dropped_count, s.support_size());
  }
}

TEST(Prune, EmptyPassesThrough) {
  const auto r = prune(SparseSpectrum(4), 0.5, 0.1);
  EXPECT_TRUE(r.spectrum.empty());
  EXPECT_EQ(r.report.total_energy, 0.0);
}

TEST(Prune, IdempotentWhenGuardCoversKeptTerms) {
  Gen g(17);
  for (int rep = 0; rep < 50; ++rep) {
    const auto s = g.spectrum(7, 2 + g.below(30));
    const double frac = 0.5 + 0.5 * g.uniform();
    const auto first = prune(s, frac, 1e9);
    // Re-pruning with the guard at the smallest kept magnitude keeps everything.
    double smallest = std::numeric_limits<double>::infinity();
    for (double c : first.spectrum.coefficients()) smallest = std::min(smallest, std::abs(c));
    const auto once = prune(s, frac, smallest);
    const auto twice = prune(once.spectrum, frac, smallest);
    EXPECT_EQ(once.spectrum, twice.spectrum);
    EXPECT_EQ(prune(once.spectrum, 1.0, 0.0).spectrum, once.spectrum);
  }
}

// The energy target is relative to the input's total, so it moves after a
// first prune. With |c| = 3, 1, 1 and fraction 0.9 a first pass keeps
// {3, 1} (10 >= 9.9) and a second pass of that keeps {3} alone (9 >= 9).
TEST(Prune, NotIdempotentInGeneral) {
  const std::size_t n = 3;
  const auto s = SparseSpectrum::from_terms(n, {{Frequency::from_indices(n, {0}), 3.0},
                                                {Frequency::from_indices(n, {1}), 1.0},
                                                {Frequency::from_indices(n, {2}), 1.0}});
  const auto once = prune(s, 0.9, 2.0);
  const auto twice = prune(once.spectrum, 0.9, 2.0);
  EXPECT_EQ(once.spectrum.support_size(), 2u);
  EXPECT_EQ(twice.spectrum.support_size(), 1u);
}

TEST(Prune, ZeroMinAmplitudeDisablesGuard) {
  const std::size_t n = 3;
  const auto s = SparseSpectrum::from_terms(n, {{Frequency::from_indices(n, {0}), 3.0},
                                                {Frequency::from_indices(n, {1}), 0.1}});
  EXPECT_EQ(prune(s, 0.9, 0.0).spectrum.support_size(), 1u);
}

TEST(Prune, RejectsBadParameters) {
  EXPECT_THROW(prune(SparseSpectrum(2), 0.0, 0.0), InvalidArgument);
  EXPECT_THROW(prune(SparseSpectrum(2), 1.5, 0.0), InvalidArgument);
  EXPECT_THROW(prune(SparseSpectrum(2), 0.5, -1.0), InvalidArgument);
}

TEST(OrthonormalScale, Values) {
  EXPECT_DOUBLE_EQ(orthonormal_scale(0), 1.0);
  EXPECT_DOUBLE_EQ(orthonormal_scale(4), 4.0);
  EXPECT_DOUBLE_EQ(orthonormal_scale(3), std::sqrt(8.0));
}

}  // namespace
}  // namespace fshap
