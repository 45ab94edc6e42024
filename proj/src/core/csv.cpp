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

#include "fshap/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "fshap/error.hpp"

namespace fshap::csv {
namespace {

std::string trim_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

Table parse(std::string_view text) {
  Table table;
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  bool any = false;  // current record has content
  std::size_t line = 1;
  std::size_t record_line = 1;

  auto finish_record = [&] {
    cells.push_back(trim_cr(std::move(cell)));
    cell.clear();
    const bool blank = cells.size() == 1 && cells[0].empty() && !any;
    if (!blank) {
      if (table.header.empty() && table.rows.empty()) {
        table.header = std::move(cells);
      } else {
        if (cells.size() != table.header.size()) {
          throw SchemaError("line " + std::to_string(record_line),
                            "expected " + std::to_string(table.header.size()) +
                                " cells, found " + std::to_string(cells.size()));
        }
        table.rows.push_back({record_line, std::move(cells)});
      }
    }
    cells = {};
    any = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        cell.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        any = true;
        break;
      case ',':
        cells.push_back(std::move(cell));
        cell.clear();
        any = true;
        break;
      case '\n':
        finish_record();
        ++line;
        record_line = line;
        break;
      default:
        cell.push_back(c);
        if (c != '\r') any = true;
    }
  }
  if (quoted) throw SchemaError("line " + std::to_string(record_line), "unterminated quote");
  if (any || !cell.empty() || !cells.empty()) finish_record();
  if (table.header.empty()) throw SchemaError("line 1", "missing header row");
  return table;
}

Table read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str());
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ":" + e.where(), std::string(e.what()).substr(e.where().size() + 2));
  }
}

std::string escape(std::string_view cell) {
  if (cell.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(cell);
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace fshap::csv
