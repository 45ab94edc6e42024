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

#include <bit>

#include "fshap/simd/kernels.hpp"

namespace fshap::simd {
namespace {

void fwht_scalar(double* data, std::size_t len) {
  for (std::size_t h = 1; h < len; h *= 2) {
    for (std::size_t i = 0; i < len; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double a = data[j];
        const double b = data[j + h];
        data[j] = a + b;
        data[j + h] = a - b;
      }
    }
  }
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

void row_terms_scalar(const std::uint64_t* freq, std::size_t words, const std::uint64_t* x,
                      const std::uint64_t* d, std::size_t stride, std::size_t rows,
                      const double* weight, double* out) {
  for (std::size_t r = 0; r < rows; ++r) {
    out[r] = apply_sign(weight[pc_and(freq, words, d, stride, r)],
                        pc_and(freq, words, x, stride, r));
  }
}

void cached_row_terms_scalar(const std::uint64_t* freq, std::size_t words,
                             const std::uint64_t* d, std::size_t stride, std::size_t rows,
                             const std::uint8_t* sign, const double* weight, double* out) {
  for (std::size_t r = 0; r < rows; ++r) {
    out[r] = apply_sign(weight[pc_and(freq, words, d, stride, r)], sign[r]);
  }
}

double row_terms_sum_scalar(const std::uint64_t* freq, std::size_t words,
                            const std::uint64_t* x, const std::uint64_t* d,
                            std::size_t stride, std::size_t rows, const double* weight) {
  double acc = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    acc += apply_sign(weight[pc_and(freq, words, d, stride, r)],
                      pc_and(freq, words, x, stride, r));
  }
  return acc;
}

void parity_signs_scalar(const std::uint64_t* freq, std::size_t words,
                         const std::uint64_t* x, std::size_t stride, std::size_t rows,
                         std::uint8_t* sign) {
  for (std::size_t r = 0; r < rows; ++r) {
    sign[r] = static_cast<std::uint8_t>(pc_and(freq, words, x, stride, r) & 1u);
  }
}

double masked_sum_scalar(const double* vals, const std::uint64_t* column, unsigned bit,
                         std::size_t rows) {
  double acc = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    if ((column[r] >> bit) & 1u) acc += vals[r];
  }
  return acc;
}

double walsh_sum_scalar(const std::uint64_t* masks, std::size_t words, std::size_t stride,
                        std::size_t count, const std::uint64_t* x, const double* coef) {
  double acc = 0.0;
  for (std::size_t f = 0; f < count; ++f) {
    unsigned c = 0;
    for (std::size_t w = 0; w < words; ++w) {
      c += static_cast<unsigned>(std::popcount(masks[w * stride + f] & x[w]));
    }
    acc += apply_sign(coef[f], c);
  }
  return acc;
}

constexpr KernelTable kScalar{
    Level::kScalar,          "scalar",
    &fwht_scalar,            &row_terms_scalar,
    &cached_row_terms_scalar, &row_terms_sum_scalar,
    &parity_signs_scalar,    &masked_sum_scalar,
    &walsh_sum_scalar,
};

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

}  // namespace fshap::simd
