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

// Validation helpers shared by the JSON readers. Failures raise SchemaError
// located by JSON pointer.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "fshap/error.hpp"

namespace fshap::json_util {

using nlohmann::json;

inline std::string child(const std::string& ptr, const std::string& key) {
  return ptr + "/" + key;
}
inline std::string child(const std::string& ptr, std::size_t index) {
  return ptr + "/" + std::to_string(index);
}

inline const json& field(const json& obj, const std::string& ptr, const std::string& key) {
  if (!obj.is_object()) throw SchemaError(ptr.empty() ? "/" : ptr, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(child(ptr, key), "missing required field");
  return *it;
}

inline const json& array_at(const json& v, const std::string& ptr) {
  if (!v.is_array()) throw SchemaError(ptr, "expected an array");
  return v;
}

inline double as_double(const json& v, const std::string& ptr) {
  if (!v.is_number()) throw SchemaError(ptr, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw SchemaError(ptr, "expected a finite number");
  return d;
}

inline std::int64_t as_int(const json& v, const std::string& ptr) {
  if (!v.is_number_integer()) throw SchemaError(ptr, "expected an integer");
  return v.get<std::int64_t>();
}

inline std::size_t as_index(const json& v, const std::string& ptr) {
  const auto i = as_int(v, ptr);
  if (i < 0) throw SchemaError(ptr, "expected a non-negative integer");
  return static_cast<std::size_t>(i);
}

inline std::string as_string(const json& v, const std::string& ptr) {
  if (!v.is_string()) throw SchemaError(ptr, "expected a string");
  return v.get<std::string>();
}

json read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const json& doc);

}  // namespace fshap::json_util
