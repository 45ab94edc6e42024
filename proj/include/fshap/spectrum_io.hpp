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

#include <filesystem>

#include <nlohmann/json.hpp>

#include "fshap/spectrum.hpp"

namespace fshap {

inline constexpr const char* kSpectrumConvention = "pm1_unnormalized";

// {"n": int, "convention": "pm1_unnormalized",
//  "terms": [{"freq": [ascending set-bit indices], "coef": float}, ...]}
// Terms are written in canonical order; doubles round-trip exactly.
nlohmann::json spectrum_to_json(const SparseSpectrum& spectrum);
SparseSpectrum spectrum_from_json(const nlohmann::json& doc);

void write_spectrum(const std::filesystem::path& path, const SparseSpectrum& spectrum);
SparseSpectrum read_spectrum(const std::filesystem::path& path);

nlohmann::json energy_report_to_json(const EnergyReport& report);

}  // namespace fshap
