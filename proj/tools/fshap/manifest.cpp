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

#include "fshap/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>

#include "fshap/error.hpp"
#include "fshap/json_util.hpp"
#include "fshap/simd/kernels.hpp"

namespace fshap::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw ResourceError("SHA-256 initialization failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    char b[3];
    std::snprintf(b, sizeof(b), "%02x", md[i]);
    hex += b;
  }
  return hex;
}

void RunManifest::add_input(const std::filesystem::path& path) {
  inputs_.push_back({{"path", path.string()},
                     {"bytes", std::filesystem::file_size(path)},
                     {"sha256", sha256_file(path)}});
}

void RunManifest::add_output(const std::filesystem::path& path) { outputs_.push_back(path); }

void RunManifest::add_phase(const std::string& name, double seconds) {
  phases_.push_back({{"name", name}, {"wall_time_s", seconds}});
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json outputs = nlohmann::json::array();
  for (const auto& p : outputs_) outputs.push_back(p.string());
  nlohmann::json doc = {{"tool", "fshap"},
                        {"version", kToolVersion},
                        {"command", command_},
                        {"simd", std::string(simd::level_name(simd::active_kernels().level))},
                        {"config", config_},
                        {"inputs", inputs_},
                        {"outputs", outputs},
                        {"phases", phases_}};
  for (const auto& [k, v] : extra_.items()) doc[k] = v;
  return doc;
}

void RunManifest::write(const std::filesystem::path& path) const {
  json_util::write_file(path, to_json());
}

}  // namespace fshap::cli
