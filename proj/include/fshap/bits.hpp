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

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fshap {

inline constexpr std::size_t kWordBits = 64;

constexpr std::size_t word_count(std::size_t n) noexcept {
  return (n + kWordBits - 1) / kWordBits;
}

/// Fixed-length bit sequence packed into 64-bit words. Bit i lives in word
/// i / 64 at position i % 64; padding bits above n are always zero.
class PackedBits {
 public:
  std::size_t size() const noexcept { return n_; }
  std::size_t num_words() const noexcept { return words_.size(); }
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  bool test(std::size_t i) const noexcept {
    return (words_[i / kWordBits] >> (i % kWordBits)) & 1u;
  }
  std::size_t popcount() const noexcept;

  /// Ascending indices of the set bits.
  std::vector<std::size_t> indices() const;
  /// '0'/'1' characters, index 0 first.
  std::string to_string() const;

 protected:
  PackedBits() = default;
  PackedBits(std::size_t n, std::vector<std::uint64_t> words);
  static std::vector<std::uint64_t> pack_bits(std::span<const std::uint8_t> bits);
  static std::vector<std::uint64_t> pack_indices(std::size_t n,
                                                 std::span<const std::size_t> idx);
  static std::vector<std::uint64_t> pack_string(std::string_view s);

  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

/// A data instance on {0,1}^n.
class PointVector : public PackedBits {
 public:
  PointVector() = default;
  /// All-zeros point of dimension n.
  explicit PointVector(std::size_t n);

  static PointVector from_bits(std::span<const std::uint8_t> bits);
  static PointVector from_bits(std::initializer_list<int> bits);
  static PointVector from_indices(std::size_t n, std::span<const std::size_t> idx);
  static PointVector from_words(std::size_t n, std::vector<std::uint64_t> words);
  static PointVector from_string(std::string_view s);

  friend bool operator==(const PointVector& a, const PointVector& b) noexcept {
    return a.n_ == b.n_ && a.words_ == b.words_;
  }

 private:
  PointVector(std::size_t n, std::vector<std::uint64_t> w)
      : PackedBits(n, std::move(w)) {}
};

/// Mask indexing the Walsh basis function (-1)^<f,x>.
///
/// Ordering is canonical everywhere: by degree first, then by the ascending
/// index list compared lexicographically, so {0,1} < {0,2} < {1,2}.
class Frequency : public PackedBits {
 public:
  Frequency() = default;
  explicit Frequency(std::size_t n);

  static Frequency from_bits(std::span<const std::uint8_t> bits);
  static Frequency from_bits(std::initializer_list<int> bits);
  static Frequency from_indices(std::size_t n, std::span<const std::size_t> idx);
  static Frequency from_indices(std::size_t n, std::initializer_list<std::size_t> idx);
  static Frequency from_words(std::size_t n, std::vector<std::uint64_t> words);
  static Frequency from_string(std::string_view s);

  std::size_t degree() const noexcept { return degree_; }

  /// Returns f XOR e_i.
  Frequency flipped(std::size_t i) const;

  friend bool operator==(const Frequency& a, const Frequency& b) noexcept {
    return a.n_ == b.n_ && a.words_ == b.words_;
  }
  friend std::strong_ordering operator<=>(const Frequency& a,
                                          const Frequency& b) noexcept;

  std::size_t hash() const noexcept;

 private:
  Frequency(std::size_t n, std::vector<std::uint64_t> w);
  std::size_t degree_ = 0;
};

/// Canonical order on raw word spans of equal length (same as Frequency's).
std::strong_ordering compare_masks(std::span<const std::uint64_t> a,
                                   std::span<const std::uint64_t> b) noexcept;

inline std::size_t popcount_and(std::span<const std::uint64_t> a,
                                std::span<const std::uint64_t> b) noexcept {
  std::size_t c = 0;
  for (std::size_t w = 0; w < a.size(); ++w) c += std::popcount(a[w] & b[w]);
  return c;
}

/// (-1)^<f,x> as +1 / -1.
inline int walsh_sign(std::span<const std::uint64_t> f,
                      std::span<const std::uint64_t> x) noexcept {
  return (popcount_and(f, x) & 1u) ? -1 : 1;
}

struct FrequencyHash {
  std::size_t operator()(const Frequency& f) const noexcept { return f.hash(); }
};

}  // namespace fshap

template <>
struct std::hash<fshap::Frequency> {
  std::size_t operator()(const fshap::Frequency& f) const noexcept { return f.hash(); }
};
