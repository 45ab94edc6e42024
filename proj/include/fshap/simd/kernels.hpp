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

// Inner loops of the transform and attribution code. Each entry has a
// portable scalar reference and, on x86-64, an AVX2 variant selected at
// runtime. Bit matrices are column-major by word ("SoA"): row r of word w is
// at base[w * stride + r], so four consecutive rows of a word are contiguous.
//
// Elementwise kernels produce bitwise identical output across levels.
// Reductions (masked_sum, row_terms_sum, walsh_sum) may differ in the last
// bits because lanes are summed in a different order; within one level the
// order is fixed, so results never depend on thread count.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace fshap::simd {

enum class Level { kScalar, kAvx2 };

struct KernelTable {
  Level level;
  const char* name;

  // Unnormalized in-place Walsh-Hadamard butterfly; len is a power of two.
  void (*fwht)(double* data, std::size_t len);

  // out[r] = (-1)^popcount(f & x_r) * weight[popcount(f & d_r)]
  void (*row_terms)(const std::uint64_t* freq, std::size_t words,
                    const std::uint64_t* x, const std::uint64_t* d, std::size_t stride,
                    std::size_t rows, const double* weight, double* out);

  // Same as row_terms with the parity taken from sign[r] (0 or 1).
  void (*cached_row_terms)(const std::uint64_t* freq, std::size_t words,
                           const std::uint64_t* d, std::size_t stride, std::size_t rows,
                           const std::uint8_t* sign, const double* weight, double* out);

  // Sum over r of the row_terms values.
  double (*row_terms_sum)(const std::uint64_t* freq, std::size_t words,
                          const std::uint64_t* x, const std::uint64_t* d,
                          std::size_t stride, std::size_t rows, const double* weight);

  // sign[r] = popcount(f & x_r) & 1
  void (*parity_signs)(const std::uint64_t* freq, std::size_t words,
                       const std::uint64_t* x, std::size_t stride, std::size_t rows,
                       std::uint8_t* sign);

  // Sum of vals[r] over rows whose word column has `bit` set.
  double (*masked_sum)(const double* vals, const std::uint64_t* column, unsigned bit,
                       std::size_t rows);

  // Sum over f of coef[f] * (-1)^popcount(mask_f & x); masks are SoA with
  // `stride` between words.
  double (*walsh_sum)(const std::uint64_t* masks, std::size_t words, std::size_t stride,
                      std::size_t count, const std::uint64_t* x, const double* coef);
};

const KernelTable& scalar_kernels() noexcept;
#if defined(FSHAP_HAVE_AVX2)
const KernelTable& avx2_kernels() noexcept;
#endif

bool cpu_supports(Level level) noexcept;

/// Kernels for the requested level; throws InvalidArgument when the level
/// was not compiled in or the CPU lacks it.
const KernelTable& kernels_for(Level level);

/// Process-wide active table. Defaults to the best supported level unless
/// FSHAP_SIMD=scalar|avx2 is set in the environment.
const KernelTable& active_kernels() noexcept;
void set_active_level(Level level);

/// Widest level this build and CPU support.
Level best_level() noexcept;
Level parse_level(std::string_view name);
std::string_view level_name(Level level) noexcept;

}  // namespace fshap::simd
