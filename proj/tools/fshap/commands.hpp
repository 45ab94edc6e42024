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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fshap::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitPropertyFailure = 1,
  kExitSchema = 2,
  kExitDimension = 3,
  kExitResource = 4,
};

struct Context {
  std::ostream& out;
  std::ostream& err;
  unsigned threads = 1;  // resolved, >= 1
  bool dry_run = false;
  std::optional<std::filesystem::path> manifest_path;
  nlohmann::json config = nlohmann::json::object();  // resolved flags
};

struct TransformArgs {
  std::filesystem::path model;
  std::string format = "native";
  std::filesystem::path out;
  std::optional<std::filesystem::path> report;
  double prune_energy = 1.0;
  double min_amp = 0.0;
  bool paper_prune = false;
};

struct ApproximateArgs {
  std::optional<std::filesystem::path> model;
  std::optional<std::filesystem::path> truth_table;
  std::optional<std::string> synthetic;
  std::size_t n = 0;
  std::string mode = "low-degree";
  std::size_t max_degree = 2;
  std::size_t samples = 0;
  double ridge = 1e-6;
  std::size_t top_k = 0;
  std::uint64_t seed = 0;
  std::size_t eval_samples = 1000;
  std::filesystem::path out;
  std::optional<std::filesystem::path> report;
};

/// Inputs shared by explain and bench: a spectrum plus background and query
/// points, either from CSV files or drawn uniformly at random.
struct InstanceArgs {
  std::optional<std::filesystem::path> spectrum;
  std::optional<std::filesystem::path> model;
  std::optional<std::string> synthetic;
  std::size_t n = 0;  // synthetic only
  std::optional<std::filesystem::path> data;
  std::optional<std::filesystem::path> schema;
  std::optional<std::filesystem::path> queries;
  std::size_t background_size = 0;  // 0 = every data row
  std::optional<std::uint64_t> background_seed;
  std::string background_strategy = "auto";
  std::size_t num_queries = 0;  // random queries when no query file
  std::uint64_t seed = 0;
};

struct ExplainArgs {
  InstanceArgs instance;
  std::string variant = "precompute";
  bool diff = false;
  bool group = false;
  std::filesystem::path out;
};

struct VerifyArgs {
  std::size_t n = 10;
  std::size_t k = 32;
  std::size_t dd = 3;
  std::size_t trials = 20;
  std::size_t background = 10;
  std::uint64_t seed = 0;
  bool corrupt_weights = false;
  std::filesystem::path out = "verify-out";
};

struct BenchArgs {
  InstanceArgs instance;
  std::string variants = "all";
  std::size_t repeat = 3;
  std::vector<double> factors{0.02, 0.1, 1.0};
  std::filesystem::path out;
};

int cmd_transform(const TransformArgs& args, Context& ctx);
int cmd_approximate(const ApproximateArgs& args, Context& ctx);
int cmd_explain(const ExplainArgs& args, Context& ctx);
int cmd_verify(const VerifyArgs& args, Context& ctx);
int cmd_bench(const BenchArgs& args, Context& ctx);

}  // namespace fshap::cli
