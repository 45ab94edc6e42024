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
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fshap/tree.hpp"

namespace fshap {

// Native model file:
//   {"n_features": int, "combine": "weighted_sum",
//    "trees": [{"weight": float, "root": node}, ...]}
//   node = {"feature": int, "left": node, "right": node} | {"value": float}
// Left children are taken when the feature is 0.
nlohmann::json ensemble_to_json(const TreeEnsemble& ensemble);
TreeEnsemble ensemble_from_json(const nlohmann::json& doc);

/// A converter turns a foreign model document into a native ensemble,
/// transposing branches where the source uses a different convention.
using ModelConverter = std::function<TreeEnsemble(const nlohmann::json&)>;

/// Registers a converter under `format`. "native" is always present.
void register_model_converter(const std::string& format, ModelConverter converter);
std::vector<std::string> model_formats();

TreeEnsemble load_model(const std::filesystem::path& path, const std::string& format = "native");
void save_model(const std::filesystem::path& path, const TreeEnsemble& ensemble);

}  // namespace fshap
