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

#include <optional>
#include <string>
#include <vector>

#include "fshap/blackbox.hpp"
#include "fshap/commands.hpp"
#include "fshap/data_io.hpp"
#include "fshap/manifest.hpp"
#include "fshap/spectrum.hpp"

namespace fshap::cli {

struct Instance {
  SparseSpectrum spectrum;
  std::optional<QueryHandle> handle;  // the original black box
  std::optional<Encoding> encoding;   // when rows came from CSV
  std::vector<PointVector> background;
  std::vector<PointVector> queries;
  std::vector<std::string> warnings;
};

/// Resolves the spectrum source, background and queries, checking that all
/// dimensions agree. Inputs are recorded in the manifest.
Instance load_instance(const InstanceArgs& args, RunManifest& manifest, const Context& ctx);

/// Writes the manifest unless this is a dry run.
void finish_manifest(const RunManifest& manifest, const std::filesystem::path& fallback,
                     const Context& ctx);

}  // namespace fshap::cli
