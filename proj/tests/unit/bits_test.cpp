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

#include <set>

#include "fshap/bits.hpp"
#include "fshap/error.hpp"
#include "test_util.hpp"

namespace fshap {
namespace {

TEST(Bits, FromBitsPacksFeatureJAtBitJ) {
  const auto x = PointVector::from_bits({1, 0, 1, 1});
  EXPECT_EQ(x.size(), 4u);
  EXPECT_EQ(x.words().size(), 1u);
  EXPECT_EQ(x.words()[0], 0b1101u);
  EXPECT_TRUE(x.test(0));
  EXPECT_FALSE(x.test(1));
  EXPECT_EQ(x.popcount(), 3u);
  EXPECT_EQ(x.to_string(), "1011");
}

TEST(Bits, StringRoundTripAcrossWordBoundary) {
  std::string s(130, '0');
  s[0] = s[63] = s[64] = s[129] = '1';
  const auto f = Frequency::from_string(s);
  EXPECT_EQ(f.words().size(), 3u);
  EXPECT_EQ(f.degree(), 4u);
  EXPECT_EQ(f.to_string(), s);
  EXPECT_EQ(f.indices(), (std::vector<std::size_t>{0, 63, 64, 129}));
}

TEST(Bits, FactoriesAgree) {
  const auto a = Frequency::from_indices(70, {2, 65});
  std::vector<std::uint64_t> w{std::uint64_t{1} << 2, std::uint64_t{1} << 1};
  const auto b = Frequency::from_words(70, w);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.hash(), b.hash());
}

TEST(Bits, RejectsInvalidInput) {
  EXPECT_THROW(Frequency::from_indices(3, {3}), InvalidArgument);
  EXPECT_THROW(PointVector::from_string("01x"), InvalidArgument);
  EXPECT_THROW(PointVector::from_bits({0, 2}), InvalidArgument);
  EXPECT_THROW(Frequency::from_words(3, {0b1000}), InvalidArgument);
  EXPECT_THROW(Frequency::from_words(3, {0, 0}), InvalidArgument);
  EXPECT_THROW(Frequency(3).flipped(3), InvalidArgument);
}

TEST(Bits, FlippedTogglesOneBit) {
  const auto f = Frequency::from_indices(5, {1, 3});
  EXPECT_EQ(f.flipped(1), Frequency::from_indices(5, {3}));
  EXPECT_EQ(f.flipped(0), Frequency::from_indices(5, {0, 1, 3}));
  EXPECT_EQ(f.flipped(0).degree(), 3u);
}

TEST(Bits, CanonicalOrderIsDegreeThenLexicographic) {
  const std::size_t n = 4;
  std::vector<Frequency> all;
  for (std::uint64_t m = 0; m < 16; ++m) all.push_back(Frequency::from_words(n, {m}));
  std::sort(all.begin(), all.end());
  std::vector<std::string> got;
  for (auto& f : all) got.push_back(f.to_string());
  const std::vector<std::string> want{"0000", "1000", "0100", "0010", "0001",
                                      "1100", "1010", "1001", "0110", "0101",
                                      "0011", "1110", "1101", "1011", "0111", "1111"};
  EXPECT_EQ(got, want);
}

TEST(Bits, CompareMasksMatchesFrequencyOrder) {
  testing::Gen g(11);
  for (int t = 0; t < 500; ++t) {
    const auto a = g.frequency(100, 100);
    const auto b = g.frequency(100, 100);
    EXPECT_EQ(compare_masks(a.words(), b.words()), a <=> b);
    EXPECT_EQ((a <=> b) == 0, a == b);
  }
}

TEST(Bits, OrderIsStrictWeakOnRandomSets) {
  testing::Gen g(5);
  std::vector<Frequency> v;
  for (int t = 0; t < 300; ++t) v.push_back(g.frequency(9, 9));
  std::sort(v.begin(), v.end());
  for (std::size_t i = 1; i < v.size(); ++i) {
    EXPECT_LE(v[i - 1].degree(), v[i].degree());
    EXPECT_FALSE(v[i] < v[i - 1]);
  }
}

TEST(Bits, WalshSignMatchesNaiveParity) {
  testing::Gen g(3);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + g.below(150);
    const auto f = g.frequency(n, n);
    const auto x = g.point(n);
    int parity = 0;
    for (std::size_t j = 0; j < n; ++j) parity ^= f.test(j) && x.test(j);
    EXPECT_EQ(walsh_sign(f.words(), x.words()), parity ? -1 : 1);
  }
}

TEST(Bits, HashSeparatesDistinctFrequencies) {
  std::set<std::size_t> hashes;
  for (std::uint64_t m = 0; m < 1024; ++m) hashes.insert(Frequency::from_words(10, {m}).hash());
  EXPECT_GT(hashes.size(), 1000u);
}

}  // namespace
}  // namespace fshap
