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

#include "fshap/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "fshap/csv.hpp"
#include "fshap/error.hpp"
#include "fshap/json_util.hpp"
#include "fshap/rng.hpp"

namespace fshap {

using nlohmann::json;
namespace ju = json_util;

const char* column_kind_name(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::kBinary:
      return "binary";
    case ColumnKind::kCategorical:
      return "categorical";
    case ColumnKind::kContinuous:
      return "continuous";
  }
  return "?";
}

namespace {

ColumnKind parse_kind(const std::string& s, const std::string& ptr) {
  if (s == "binary") return ColumnKind::kBinary;
  if (s == "categorical") return ColumnKind::kCategorical;
  if (s == "continuous") return ColumnKind::kContinuous;
  throw SchemaError(ptr, "unknown column kind '" + s + "'");
}

bool parse_number(const std::string& cell, double& out) {
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && last[-1] == ' ') --last;
  if (first < last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && first != last && std::isfinite(out);
}

std::string format_edge(double v) { return csv::format_double(v); }

}  // namespace

Schema schema_from_json(const json& doc) {
  ju::array_at(doc, "");
  Schema schema;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string ptr = ju::child("", i);
    const auto& col = doc[i];
    ColumnSchema c;
    c.name = ju::as_string(ju::field(col, ptr, "name"), ju::child(ptr, "name"));
    if (c.name.empty()) throw SchemaError(ju::child(ptr, "name"), "empty column name");
    c.kind = parse_kind(ju::as_string(ju::field(col, ptr, "kind"), ju::child(ptr, "kind")),
                        ju::child(ptr, "kind"));
    if (auto it = col.find("bins"); it != col.end()) {
      if (c.kind != ColumnKind::kContinuous) {
        throw SchemaError(ju::child(ptr, "bins"), "bins only apply to continuous columns");
      }
      c.bins = ju::as_index(*it, ju::child(ptr, "bins"));
      if (c.bins == 0) throw SchemaError(ju::child(ptr, "bins"), "bins must be >= 1");
    }
    if (auto it = col.find("levels"); it != col.end()) {
      const std::string lp = ju::child(ptr, "levels");
      if (c.kind != ColumnKind::kCategorical) {
        throw SchemaError(lp, "levels only apply to categorical columns");
      }
      ju::array_at(*it, lp);
      for (std::size_t l = 0; l < it->size(); ++l) {
        auto level = ju::as_string((*it)[l], ju::child(lp, l));
        if (std::find(c.levels.begin(), c.levels.end(), level) != c.levels.end()) {
          throw SchemaError(ju::child(lp, l), "duplicate level '" + level + "'");
        }
        c.levels.push_back(std::move(level));
      }
    }
    for (const auto& prev : schema) {
      if (prev.name == c.name) {
        throw SchemaError(ju::child(ptr, "name"), "duplicate column '" + c.name + "'");
      }
    }
    schema.push_back(std::move(c));
  }
  if (schema.empty()) throw SchemaError("", "schema has no columns");
  return schema;
}

Schema read_schema(const std::filesystem::path& path) {
  const auto doc = ju::read_file(path);
  try {
    return schema_from_json(doc);
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ":" + e.where(),
                      std::string(e.what()).substr(e.where().size() + 2));
  }
}

// ---------------------------------------------------------------------------

std::vector<double> quantile_edges(std::vector<double> values, std::size_t bins) {
  if (bins == 0) throw InvalidArgument("quantile binning needs at least one bin");
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  const std::size_t m = values.size();
  std::vector<double> edges;
  for (std::size_t j = 1; j < bins; ++j) {
    const std::size_t pos = (j * m + bins - 1) / bins;
    if (pos == 0 || pos >= m) continue;
    if (!edges.empty() && edges.back() == values[pos]) continue;
    edges.push_back(values[pos]);
  }
  return edges;
}

Encoding::Encoding(std::vector<ColumnEncoding> columns) : columns_(std::move(columns)) {
  for (const auto& c : columns_) {
    if (c.kind == ColumnKind::kContinuous) {
      if (c.width == 0) throw InvalidArgument("continuous column '" + c.name + "' has no bins");
      if (c.edges.size() >= c.width) {
        throw InvalidArgument("column '" + c.name + "' has more edges than bins");
      }
      for (std::size_t e = 1; e < c.edges.size(); ++e) {
        if (!(c.edges[e - 1] < c.edges[e])) {
          throw InvalidArgument("column '" + c.name + "' edges must be strictly ascending");
        }
      }
    }
  }
  relayout();
}

void Encoding::relayout() {
  width_ = 0;
  for (auto& c : columns_) {
    c.offset = width_;
    if (c.kind == ColumnKind::kBinary) c.width = 1;
    if (c.kind == ColumnKind::kCategorical) c.width = c.levels.size();
    width_ += c.width;
  }
}

std::vector<std::string> Encoding::encoded_names() const {
  std::vector<std::string> out;
  out.reserve(width_);
  for (const auto& c : columns_) {
    switch (c.kind) {
      case ColumnKind::kBinary:
        out.push_back(c.name);
        break;
      case ColumnKind::kCategorical:
        for (const auto& l : c.levels) out.push_back(c.name + "=" + l);
        break;
      case ColumnKind::kContinuous:
        for (std::size_t b = 0; b < c.width; ++b) {
          out.push_back(c.name + "#bin" + std::to_string(b));
        }
        break;
    }
  }
  return out;
}

std::size_t Encoding::bin_of(std::span<const double> edges, double v) {
  return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), v) -
                                  edges.begin());
}

PointVector Encoding::encode_row(std::span<const std::string> cells, UnknownLevelPolicy policy,
                                 std::vector<std::string>* warnings, const std::string& where) {
  if (cells.size() != columns_.size()) {
    throw DimensionError(where + (where.empty() ? "" : ": ") + "row has " +
                         std::to_string(cells.size()) + " cells, encoding has " +
                         std::to_string(columns_.size()) + " columns");
  }
  // Resolve categorical levels first so the layout is final before packing.
  std::vector<std::size_t> hot(columns_.size(), 0);
  bool grew = false;
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    auto& col = columns_[c];
    const std::string& cell = cells[c];
    const std::string loc = where + (where.empty() ? "" : ", ") + "column '" + col.name + "'";
    switch (col.kind) {
      case ColumnKind::kBinary:
        if (cell != "0" && cell != "1") throw SchemaError(loc, "expected 0 or 1, got '" + cell + "'");
        hot[c] = cell == "1";
        break;
      case ColumnKind::kCategorical: {
        auto it = std::find(col.levels.begin(), col.levels.end(), cell);
        if (it == col.levels.end()) {
          if (policy == UnknownLevelPolicy::kError) {
            throw SchemaError(loc, "unknown level '" + cell + "'");
          }
          col.levels.push_back(cell);
          grew = true;
          if (warnings) {
            warnings->push_back(loc + ": unknown level '" + cell +
                                "' appended as a new one-hot column");
          }
          hot[c] = col.levels.size() - 1;
        } else {
          hot[c] = static_cast<std::size_t>(it - col.levels.begin());
        }
        break;
      }
      case ColumnKind::kContinuous: {
        double v = 0.0;
        if (!parse_number(cell, v)) throw SchemaError(loc, "malformed number '" + cell + "'");
        hot[c] = bin_of(col.edges, v);
        break;
      }
    }
  }
  if (grew) relayout();
  std::vector<std::size_t> idx;
  idx.reserve(columns_.size());
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    const auto& col = columns_[c];
    if (col.kind == ColumnKind::kBinary) {
      if (hot[c]) idx.push_back(col.offset);
    } else {
      idx.push_back(col.offset + hot[c]);
    }
  }
  return PointVector::from_indices(width_, idx);
}

std::vector<DecodedCell> Encoding::decode_row(const PointVector& x) const {
  if (x.size() != width_) {
    throw DimensionError("point of dimension " + std::to_string(x.size()) +
                         " decoded against an encoding of width " + std::to_string(width_));
  }
  std::vector<DecodedCell> out;
  out.reserve(columns_.size());
  for (const auto& col : columns_) {
    if (col.kind == ColumnKind::kBinary) {
      const bool b = x.test(col.offset);
      out.push_back({b ? 1u : 0u, b ? "1" : "0"});
      continue;
    }
    std::size_t count = 0;
    std::size_t which = 0;
    for (std::size_t j = 0; j < col.width; ++j) {
      if (x.test(col.offset + j)) {
        ++count;
        which = j;
      }
    }
    if (count != 1) {
      throw InvalidArgument("column '" + col.name + "' has " + std::to_string(count) +
                            " hot bits");
    }
    if (col.kind == ColumnKind::kCategorical) {
      out.push_back({which, col.levels[which]});
    } else {
      const std::string lo = which == 0 ? "-inf" : format_edge(col.edges[which - 1]);
      const std::string hi = which < col.edges.size() ? format_edge(col.edges[which]) : "inf";
      out.push_back({which, "[" + lo + ", " + hi + ")"});
    }
  }
  return out;
}

json Encoding::to_json() const {
  json cols = json::array();
  for (const auto& c : columns_) {
    json j = {{"name", c.name},
              {"kind", column_kind_name(c.kind)},
              {"offset", c.offset},
              {"width", c.width}};
    if (c.kind == ColumnKind::kCategorical) j["levels"] = c.levels;
    if (c.kind == ColumnKind::kContinuous) j["edges"] = c.edges;
    cols.push_back(std::move(j));
  }
  return {{"width", width_}, {"columns", std::move(cols)}};
}

Encoding Encoding::from_json(const json& doc) {
  const auto& cols = ju::array_at(ju::field(doc, "", "columns"), "/columns");
  std::vector<ColumnEncoding> out;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    const std::string ptr = ju::child("/columns", i);
    ColumnEncoding c;
    c.name = ju::as_string(ju::field(cols[i], ptr, "name"), ju::child(ptr, "name"));
    c.kind = parse_kind(ju::as_string(ju::field(cols[i], ptr, "kind"), ju::child(ptr, "kind")),
                        ju::child(ptr, "kind"));
    c.width = ju::as_index(ju::field(cols[i], ptr, "width"), ju::child(ptr, "width"));
    if (c.kind == ColumnKind::kCategorical) {
      const std::string lp = ju::child(ptr, "levels");
      const auto& lv = ju::array_at(ju::field(cols[i], ptr, "levels"), lp);
      for (std::size_t l = 0; l < lv.size(); ++l) {
        c.levels.push_back(ju::as_string(lv[l], ju::child(lp, l)));
      }
    }
    if (c.kind == ColumnKind::kContinuous) {
      const std::string ep = ju::child(ptr, "edges");
      const auto& ev = ju::array_at(ju::field(cols[i], ptr, "edges"), ep);
      for (std::size_t e = 0; e < ev.size(); ++e) {
        c.edges.push_back(ju::as_double(ev[e], ju::child(ep, e)));
      }
    }
    out.push_back(std::move(c));
  }
  try {
    return Encoding(std::move(out));
  } catch (const InvalidArgument& e) {
    throw SchemaError("/columns", e.what());
  }
}

// ---------------------------------------------------------------------------

TabularDataset::TabularDataset(Schema schema, std::vector<RawRow> rows, Encoding encoding,
                               std::vector<PointVector> points,
                               std::vector<std::string> warnings)
    : schema_(std::move(schema)),
      rows_(std::move(rows)),
      encoding_(std::move(encoding)),
      points_(std::move(points)),
      warnings_(std::move(warnings)) {}

namespace {

// Column permutation from the CSV header to schema order.
std::vector<std::size_t> header_positions(const std::vector<std::string>& header,
                                          const std::vector<std::string>& names,
                                          const std::string& file) {
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t h = 0; h < header.size(); ++h) {
    if (!pos.emplace(header[h], h).second) {
      throw SchemaError(file + ":line 1", "duplicate header column '" + header[h] + "'");
    }
  }
  std::vector<std::size_t> out;
  for (const auto& name : names) {
    auto it = pos.find(name);
    if (it == pos.end()) throw SchemaError(file + ":line 1", "missing column '" + name + "'");
    out.push_back(it->second);
    pos.erase(it);
  }
  if (!pos.empty()) {
    throw SchemaError(file + ":line 1",
                      "column '" + header[pos.begin()->second] + "' is not in the schema");
  }
  return out;
}

std::vector<RawRow> reorder(const csv::Table& table, const std::vector<std::size_t>& perm) {
  std::vector<RawRow> rows;
  rows.reserve(table.rows.size());
  for (const auto& r : table.rows) {
    RawRow out{r.line, {}};
    out.cells.reserve(perm.size());
    for (std::size_t p : perm) out.cells.push_back(r.cells[p]);
    rows.push_back(std::move(out));
  }
  return rows;
}

}  // namespace

TabularDataset load_csv(const std::filesystem::path& path, const Schema& schema) {
  if (schema.empty()) throw InvalidArgument("empty schema");
  const std::string file = path.string();
  const auto table = csv::read(path);
  std::vector<std::string> names;
  for (const auto& c : schema) names.push_back(c.name);
  auto rows = reorder(table, header_positions(table.header, names, file));

  std::vector<std::string> warnings;
  std::vector<ColumnEncoding> cols;
  for (std::size_t c = 0; c < schema.size(); ++c) {
    const auto& s = schema[c];
    ColumnEncoding e{s.name, s.kind, 0, 0, {}, {}};
    if (s.kind == ColumnKind::kCategorical) {
      e.levels = s.levels;
      const bool fixed = !s.levels.empty();
      for (const auto& r : rows) {
        const auto& cell = r.cells[c];
        if (std::find(e.levels.begin(), e.levels.end(), cell) == e.levels.end()) {
          if (fixed) {
            warnings.push_back(file + ":line " + std::to_string(r.line) + ", column '" +
                               s.name + "': unknown level '" + cell +
                               "' appended as a new one-hot column");
          }
          e.levels.push_back(cell);
        }
      }
    } else if (s.kind == ColumnKind::kContinuous) {
      std::vector<double> values;
      values.reserve(rows.size());
      for (const auto& r : rows) {
        double v = 0.0;
        if (!parse_number(r.cells[c], v)) {
          throw SchemaError(file + ":line " + std::to_string(r.line),
                            "column '" + s.name + "': malformed number '" + r.cells[c] + "'");
        }
        values.push_back(v);
      }
      e.edges = quantile_edges(std::move(values), s.bins);
      e.width = s.bins;
    }
    cols.push_back(std::move(e));
  }
  Encoding encoding(std::move(cols));
  std::vector<PointVector> points;
  points.reserve(rows.size());
  for (const auto& r : rows) {
    points.push_back(encoding.encode_row(r.cells, UnknownLevelPolicy::kError, nullptr,
                                         file + ":line " + std::to_string(r.line)));
  }
  return TabularDataset(schema, std::move(rows), std::move(encoding), std::move(points),
                        std::move(warnings));
}

EncodedQueries encode_csv(const std::filesystem::path& path, Encoding& encoding,
                          UnknownLevelPolicy policy) {
  const std::string file = path.string();
  const auto table = csv::read(path);
  std::vector<std::string> names;
  for (const auto& c : encoding.columns()) names.push_back(c.name);
  const auto rows = reorder(table, header_positions(table.header, names, file));
  EncodedQueries out;
  for (const auto& r : rows) {
    out.points.push_back(encoding.encode_row(r.cells, policy, &out.warnings,
                                             file + ":line " + std::to_string(r.line)));
  }
  // Earlier rows were packed before any later growth of the encoding.
  if (!out.points.empty() && out.points.front().size() != encoding.width()) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out.points[i] = encoding.encode_row(rows[i].cells, UnknownLevelPolicy::kError, nullptr);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> background_indices(std::size_t rows, const BackgroundSpec& spec) {
  if (spec.size == 0) throw InvalidArgument("background size must be >= 1");
  if (spec.size > rows) {
    throw InvalidArgument("background size " + std::to_string(spec.size) + " exceeds the " +
                          std::to_string(rows) + " available rows");
  }
  std::vector<std::size_t> idx(rows);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (spec.strategy == BackgroundStrategy::kRandom) {
    CounterRng rng(spec.seed, 0xb6c9);
    for (std::size_t j = 0; j < spec.size; ++j) {
      std::swap(idx[j], idx[j + rng.below(rows - j)]);
    }
  }
  idx.resize(spec.size);
  return idx;
}

BackgroundDataset select_background(const TabularDataset& ds, const BackgroundSpec& spec) {
  std::vector<PointVector> points;
  for (std::size_t r : background_indices(ds.size(), spec)) points.push_back(ds.points()[r]);
  return BackgroundDataset(std::move(points));
}

std::vector<GroupAttribution> aggregate_groups(const Encoding& encoding,
                                               std::span<const double> phi) {
  if (phi.size() != encoding.width()) {
    throw DimensionError("attribution vector of length " + std::to_string(phi.size()) +
                         " against an encoding of width " + std::to_string(encoding.width()));
  }
  std::vector<GroupAttribution> out;
  for (const auto& c : encoding.columns()) {
    double s = 0.0;
    for (std::size_t j = 0; j < c.width; ++j) s += phi[c.offset + j];
    out.push_back({c.name, s});
  }
  return out;
}

}  // namespace fshap
