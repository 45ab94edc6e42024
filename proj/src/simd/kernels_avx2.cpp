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

// Compiled with -mavx2 -mpopcnt; only reached through the dispatch table
// after a runtime CPU check.

#include <immintrin.h>

#include <bit>

#include "fshap/simd/kernels.hpp"

namespace fshap::simd {
namespace {

// Nibble-LUT popcount; returns per-64-bit-lane counts.
inline __m256i popcnt_epi64(__m256i v) {
  const __m256i lut = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                       0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i low_mask = _mm256_set1_epi8(0x0f);
  const __m256i lo = _mm256_and_si256(v, low_mask);
  const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
  const __m256i cnt =
      _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo), _mm256_shuffle_epi8(lut, hi));
  return _mm256_sad_epu8(cnt, _mm256_setzero_si256());
}

inline __m256i load4(const std::uint64_t* p) {
  return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
}

inline double hsum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

inline unsigned pc_and(const std::uint64_t* freq, std::size_t words,
                       const std::uint64_t* m, std::size_t stride, std::size_t r) {
  unsigned c = 0;
  for (std::size_t w = 0; w < words; ++w) {
    c += static_cast<unsigned>(std::popcount(freq[w] & m[w * stride + r]));
  }
  return c;
}

inline double apply_sign(double v, unsigned parity) {
  return std::bit_cast<double>(std::bit_cast<std::uint64_t>(v) ^
                               (std::uint64_t{parity & 1u} << 63));
}

// Weighted sign terms for rows r..r+3.
inline __m256d terms4(const std::uint64_t* freq, std::size_t words, const std::uint64_t* x,
                      const std::uint64_t* d, std::size_t stride, std::size_t r,
                      const double* weight) {
  __m256i pcx = _mm256_setzero_si256();
  __m256i pcd = _mm256_setzero_si256();
  for (std::size_t w = 0; w < words; ++w) {
    const __m256i fw = _mm256_set1_epi64x(static_cast<long long>(freq[w]));
    pcx = _mm256_add_epi64(pcx, popcnt_epi64(_mm256_and_si256(fw, load4(x + w * stride + r))));
    pcd = _mm256_add_epi64(pcd, popcnt_epi64(_mm256_and_si256(fw, load4(d + w * stride + r))));
  }
  const __m256d wv = _mm256_i64gather_pd(weight, pcd, 8);
  const __m256i sign = _mm256_slli_epi64(_mm256_and_si256(pcx, _mm256_set1_epi64x(1)), 63);
  return _mm256_xor_pd(wv, _mm256_castsi256_pd(sign));
}

void fwht_avx2(double* data, std::size_t len) {
  std::size_t h = 1;
  for (; h < len && h < 4; h *= 2) {
    for (std::size_t i = 0; i < len; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double a = data[j];
        const double b = data[j + h];
        data[j] = a + b;
        data[j + h] = a - b;
      }
    }
  }
  for (; h < len; h *= 2) {
    for (std::size_t i = 0; i < len; i += 2 * h) {
      for (std::size_t j = i; j < i + h; j += 4) {
        const __m256d a = _mm256_loadu_pd(data + j);
        const __m256d b = _mm256_loadu_pd(data + j + h);
        _mm256_storeu_pd(data + j, _mm256_add_pd(a, b));
        _mm256_storeu_pd(data + j + h, _mm256_sub_pd(a, b));
      }
    }
  }
}

void row_terms_avx2(const std::uint64_t* freq, std::size_t words, const std::uint64_t* x,
                    const std::uint64_t* d, std::size_t stride, std::size_t rows,
                    const double* weight, double* out) {
  std::size_t r = 0;
  for (; r + 4 <= rows; r += 4) {
    _mm256_storeu_pd(out + r, terms4(freq, words, x, d, stride, r, weight));
  }
  for (; r < rows; ++r) {
    out[r] = apply_sign(weight[pc_and(freq, words, d, stride, r)],
                        pc_and(freq, words, x, stride, r));
  }
}

void cached_row_terms_avx2(const std::uint64_t* freq, std::size_t words,
                           const std::uint64_t* d, std::size_t stride, std::size_t rows,
                           const std::uint8_t* sign, const double* weight, double* out) {
  std::size_t r = 0;
  for (; r + 4 <= rows; r += 4) {
    __m256i pcd = _mm256_setzero_si256();
    for (std::size_t w = 0; w < words; ++w) {
      const __m256i fw = _mm256_set1_epi64x(static_cast<long long>(freq[w]));
      pcd = _mm256_add_epi64(pcd,
                             popcnt_epi64(_mm256_and_si256(fw, load4(d + w * stride + r))));
    }
    const __m256d wv = _mm256_i64gather_pd(weight, pcd, 8);
    std::int32_t packed;
    __builtin_memcpy(&packed, sign + r, sizeof(packed));
    const __m256i s = _mm256_slli_epi64(_mm256_cvtepu8_epi64(_mm_cvtsi32_si128(packed)), 63);
    _mm256_storeu_pd(out + r, _mm256_xor_pd(wv, _mm256_castsi256_pd(s)));
  }
  for (; r < rows; ++r) {
    out[r] = apply_sign(weight[pc_and(freq, words, d, stride, r)], sign[r]);
  }
}

double row_terms_sum_avx2(const std::uint64_t* freq, std::size_t words,
                          const std::uint64_t* x, const std::uint64_t* d, std::size_t stride,
                          std::size_t rows, const double* weight) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t r = 0;
  for (; r + 4 <= rows; r += 4) {
    acc = _mm256_add_pd(acc, terms4(freq, words, x, d, stride, r, weight));
  }
  double total = hsum(acc);
  for (; r < rows; ++r) {
    total += apply_sign(weight[pc_and(freq, words, d, stride, r)],
                        pc_and(freq, words, x, stride, r));
  }
  return total;
}

void parity_signs_avx2(const std::uint64_t* freq, std::size_t words, const std::uint64_t* x,
                       std::size_t stride, std::size_t rows, std::uint8_t* sign) {
  std::size_t r = 0;
  for (; r + 4 <= rows; r += 4) {
    __m256i pcx = _mm256_setzero_si256();
    for (std::size_t w = 0; w < words; ++w) {
      const __m256i fw = _mm256_set1_epi64x(static_cast<long long>(freq[w]));
      pcx = _mm256_add_epi64(pcx,
                             popcnt_epi64(_mm256_and_si256(fw, load4(x + w * stride + r))));
    }
    alignas(32) std::uint64_t lanes[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), pcx);
    for (int l = 0; l < 4; ++l) sign[r + l] = static_cast<std::uint8_t>(lanes[l] & 1u);
  }
  for (; r < rows; ++r) {
    sign[r] = static_cast<std::uint8_t>(pc_and(freq, words, x, stride, r) & 1u);
  }
}

double masked_sum_avx2(const double* vals, const std::uint64_t* column, unsigned bit,
                       std::size_t rows) {
  const __m128i shift = _mm_cvtsi32_si128(static_cast<int>(63 - bit));
  __m256d acc = _mm256_setzero_pd();
  std::size_t r = 0;
  for (; r + 4 <= rows; r += 4) {
    const __m256i m = _mm256_sll_epi64(load4(column + r), shift);
    const __m256d v = _mm256_loadu_pd(vals + r);
    acc = _mm256_add_pd(acc, _mm256_blendv_pd(_mm256_setzero_pd(), v, _mm256_castsi256_pd(m)));
  }
  double total = hsum(acc);
  for (; r < rows; ++r) {
    if ((column[r] >> bit) & 1u) total += vals[r];
  }
  return total;
}

double walsh_sum_avx2(const std::uint64_t* masks, std::size_t words, std::size_t stride,
                      std::size_t count, const std::uint64_t* x, const double* coef) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t f = 0;
  for (; f + 4 <= count; f += 4) {
    __m256i pc = _mm256_setzero_si256();
    for (std::size_t w = 0; w < words; ++w) {
      const __m256i xw = _mm256_set1_epi64x(static_cast<long long>(x[w]));
      pc = _mm256_add_epi64(pc, popcnt_epi64(_mm256_and_si256(xw, load4(masks + w * stride + f))));
    }
    const __m256i sign = _mm256_slli_epi64(_mm256_and_si256(pc, _mm256_set1_epi64x(1)), 63);
    acc = _mm256_add_pd(acc, _mm256_xor_pd(_mm256_loadu_pd(coef + f), _mm256_castsi256_pd(sign)));
  }
  double total = hsum(acc);
  for (; f < count; ++f) {
    unsigned c = 0;
    for (std::size_t w = 0; w < words; ++w) {
      c += static_cast<unsigned>(std::popcount(masks[w * stride + f] & x[w]));
    }
    total += apply_sign(coef[f], c);
  }
  return total;
}

constexpr KernelTable kAvx2{
    Level::kAvx2,          "avx2",
    &fwht_avx2,            &row_terms_avx2,
    &cached_row_terms_avx2, &row_terms_sum_avx2,
    &parity_signs_avx2,    &masked_sum_avx2,
    &walsh_sum_avx2,
};

}  // namespace

const KernelTable& avx2_kernels() noexcept { return kAvx2; }

}  // namespace fshap::simd
