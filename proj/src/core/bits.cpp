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

#include "fshap/bits.hpp"

#include "fshap/error.hpp"

namespace fshap {

PackedBits::PackedBits(std::size_t n, std::vector<std::uint64_t> words)
    : n_(n), words_(std::move(words)) {
  if (words_.size() != word_count(n)) {
    throw InvalidArgument("packed word count does not match dimension " +
                          std::to_string(n));
  }
  if (n % kWordBits != 0 && !words_.empty()) {
    const std::uint64_t pad = ~std::uint64_t{0} << (n % kWordBits);
    if (words_.back() & pad) {
      throw InvalidArgument("bits set beyond dimension " + std::to_string(n));
    }
  }
}

std::size_t PackedBits::popcount() const noexcept {
  std::size_t c = 0;
  for (auto w : words_) c += std::popcount(w);
  return c;
}

std::vector<std::size_t> PackedBits::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t word = words_[w];
    while (word) {
      out.push_back(w * kWordBits + static_cast<std::size_t>(std::countr_zero(word)));
      word &= word - 1;
    }
  }
  return out;
}

std::string PackedBits::to_string() const {
  std::string s(n_, '0');
  for (std::size_t i = 0; i < n_; ++i) {
    if (test(i)) s[i] = '1';
  }
  return s;
}

std::vector<std::uint64_t> PackedBits::pack_bits(std::span<const std::uint8_t> bits) {
  std::vector<std::uint64_t> w(word_count(bits.size()), 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] > 1) {
      throw InvalidArgument("bit " + std::to_string(i) + " is not 0 or 1");
    }
    if (bits[i]) w[i / kWordBits] |= std::uint64_t{1} << (i % kWordBits);
  }
  return w;
}

std::vector<std::uint64_t> PackedBits::pack_indices(std::size_t n,
                                                    std::span<const std::size_t> idx) {
  std::vector<std::uint64_t> w(word_count(n), 0);
  for (auto i : idx) {
    if (i >= n) {
      throw InvalidArgument("index " + std::to_string(i) + " out of range for n=" +
                            std::to_string(n));
    }
    w[i / kWordBits] |= std::uint64_t{1} << (i % kWordBits);
  }
  return w;
}

std::vector<std::uint64_t> PackedBits::pack_string(std::string_view s) {
  std::vector<std::uint8_t> bits(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '0' && s[i] != '1') {
      throw InvalidArgument("bit string contains '" + std::string(1, s[i]) + "'");
    }
    bits[i] = s[i] == '1';
  }
  return pack_bits(bits);
}

// ---------------------------------------------------------------------------

PointVector::PointVector(std::size_t n)
    : PackedBits(n, std::vector<std::uint64_t>(word_count(n), 0)) {}

PointVector PointVector::from_bits(std::span<const std::uint8_t> bits) {
  return {bits.size(), pack_bits(bits)};
}

PointVector PointVector::from_bits(std::initializer_list<int> bits) {
  std::vector<std::uint8_t> b;
  for (int v : bits) b.push_back(static_cast<std::uint8_t>(v));
  return from_bits(b);
}

PointVector PointVector::from_indices(std::size_t n, std::span<const std::size_t> idx) {
  return {n, pack_indices(n, idx)};
}

PointVector PointVector::from_words(std::size_t n, std::vector<std::uint64_t> words) {
  return {n, std::move(words)};
}

PointVector PointVector::from_string(std::string_view s) {
  return {s.size(), pack_string(s)};
}

// ---------------------------------------------------------------------------

Frequency::Frequency(std::size_t n, std::vector<std::uint64_t> w)
    : PackedBits(n, std::move(w)), degree_(PackedBits::popcount()) {}

Frequency::Frequency(std::size_t n)
    : Frequency(n, std::vector<std::uint64_t>(word_count(n), 0)) {}

Frequency Frequency::from_bits(std::span<const std::uint8_t> bits) {
  return {bits.size(), pack_bits(bits)};
}

Frequency Frequency::from_bits(std::initializer_list<int> bits) {
  std::vector<std::uint8_t> b;
  for (int v : bits) b.push_back(static_cast<std::uint8_t>(v));
  return from_bits(b);
}

Frequency Frequency::from_indices(std::size_t n, std::span<const std::size_t> idx) {
  return {n, pack_indices(n, idx)};
}

Frequency Frequency::from_indices(std::size_t n, std::initializer_list<std::size_t> idx) {
  std::vector<std::size_t> v(idx);
  return from_indices(n, v);
}

Frequency Frequency::from_words(std::size_t n, std::vector<std::uint64_t> words) {
  return {n, std::move(words)};
}

Frequency Frequency::from_string(std::string_view s) {
  return {s.size(), pack_string(s)};
}

Frequency Frequency::flipped(std::size_t i) const {
  if (i >= n_) throw InvalidArgument("flip index out of range");
  auto w = words_;
  w[i / kWordBits] ^= std::uint64_t{1} << (i % kWordBits);
  return {n_, std::move(w)};
}

std::strong_ordering compare_masks(std::span<const std::uint64_t> a,
                                   std::span<const std::uint64_t> b) noexcept {
  std::size_t da = 0;
  std::size_t db = 0;
  for (auto w : a) da += std::popcount(w);
  for (auto w : b) db += std::popcount(w);
  if (da != db) return da <=> db;
  for (std::size_t w = 0; w < a.size(); ++w) {
    const std::uint64_t diff = a[w] ^ b[w];
    if (diff) {
      const std::uint64_t low = diff & (~diff + 1);
      // The mask holding the lowest differing bit lists that index first.
      return (a[w] & low) ? std::strong_ordering::less : std::strong_ordering::greater;
    }
  }
  return std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const Frequency& a, const Frequency& b) noexcept {
  if (a.n_ != b.n_) return a.n_ <=> b.n_;
  return compare_masks(a.words_, b.words_);
}

std::size_t Frequency::hash() const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ull ^ n_;
  for (auto w : words_) {
    h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

}  // namespace fshap
