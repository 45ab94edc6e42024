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

#include <atomic>
#include <cstdlib>
#include <string>

#include "fshap/error.hpp"
#include "fshap/simd/kernels.hpp"

namespace fshap::simd {

bool cpu_supports(Level level) noexcept {
  switch (level) {
    case Level::kScalar:
      return true;
    case Level::kAvx2:
#if defined(FSHAP_HAVE_AVX2)
      __builtin_cpu_init();
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("popcnt");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Level level) {
  if (!cpu_supports(level)) {
    throw InvalidArgument("SIMD level '" + std::string(level_name(level)) +
                          "' is not available on this build or CPU");
  }
#if defined(FSHAP_HAVE_AVX2)
  if (level == Level::kAvx2) return avx2_kernels();
#endif
  return scalar_kernels();
}

Level best_level() noexcept {
  return cpu_supports(Level::kAvx2) ? Level::kAvx2 : Level::kScalar;
}

Level parse_level(std::string_view name) {
  if (name == "scalar") return Level::kScalar;
  if (name == "avx2") return Level::kAvx2;
  throw InvalidArgument("unknown SIMD level '" + std::string(name) + "'");
}

std::string_view level_name(Level level) noexcept {
  return level == Level::kAvx2 ? "avx2" : "scalar";
}

namespace {

const KernelTable* initial_table() noexcept {
  if (const char* env = std::getenv("FSHAP_SIMD"); env != nullptr && *env != '\0') {
    try {
      const std::string_view v(env);
      if (v != "auto") return &kernels_for(parse_level(v));
    } catch (const Error&) {
      // Unsupported request falls back to auto-detection.
    }
  }
  return &kernels_for(best_level());
}

std::atomic<const KernelTable*>& active_slot() noexcept {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

}  // namespace

const KernelTable& active_kernels() noexcept {
  return *active_slot().load(std::memory_order_acquire);
}

void set_active_level(Level level) {
  active_slot().store(&kernels_for(level), std::memory_order_release);
}

}  // namespace fshap::simd
