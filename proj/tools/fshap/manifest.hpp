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

#include <chrono>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace fshap::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Record of one invocation: resolved parameters (in the --config layout, so
/// a manifest can be passed back as --config), input digests, outputs and
/// wall time per phase.
class RunManifest {
 public:
  explicit RunManifest(std::string command) : command_(std::move(command)) {}

  void set_config(nlohmann::json config) { config_ = std::move(config); }
  void set(const std::string& key, nlohmann::json value) { extra_[key] = std::move(value); }
  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);
  void add_phase(const std::string& name, double seconds);

  template <class F>
  decltype(auto) timed(const std::string& name, F&& fn) {
    const auto start = std::chrono::steady_clock::now();
    struct Stop {
      RunManifest* self;
      const std::string& name;
      std::chrono::steady_clock::time_point start;
      ~Stop() {
        self->add_phase(name, std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                            start)
                                  .count());
      }
    } stop{this, name, start};
    return fn();
  }

  const std::vector<std::filesystem::path>& outputs() const noexcept { return outputs_; }
  nlohmann::json to_json() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::string command_;
  nlohmann::json config_ = nlohmann::json::object();
  nlohmann::json extra_ = nlohmann::json::object();
  nlohmann::json inputs_ = nlohmann::json::array();
  nlohmann::json phases_ = nlohmann::json::array();
  std::vector<std::filesystem::path> outputs_;
};

}  // namespace fshap::cli
