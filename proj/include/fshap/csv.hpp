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

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fshap::csv {

struct Row {
  std::size_t line = 0;  // 1-based line number in the source
  std::vector<std::string> cells;
};

struct Table {
  std::vector<std::string> header;
  std::vector<Row> rows;
};

/// RFC 4180-style reader: comma separated, double-quoted fields may contain
/// commas, quotes ("") and newlines. Blank lines are skipped. Every row must
/// have as many cells as the header (SchemaError otherwise).
Table parse(std::string_view text);
Table read(const std::filesystem::path& path);

/// Quotes a cell when it contains a comma, quote or newline.
std::string escape(std::string_view cell);

/// %.17g, the fixed float format of every CSV this library writes.
std::string format_double(double v);

}  // namespace fshap::csv
