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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fshap/bits.hpp"
#include "fshap/shap.hpp"

namespace fshap {

enum class ColumnKind { kBinary, kCategorical, kContinuous };

const char* column_kind_name(ColumnKind kind);

inline constexpr std::size_t kDefaultQuantileBins = 4;

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::kBinary;
  std::size_t bins = kDefaultQuantileBins;  // continuous only
  // Categorical only: levels fixed up front. Unseen levels met while loading
  // are appended after these with a warning.
  std::vector<std::string> levels;
};

using Schema = std::vector<ColumnSchema>;

Schema schema_from_json(const nlohmann::json& doc);
Schema read_schema(const std::filesystem::path& path);

enum class UnknownLevelPolicy { kAppend, kError };

/// One source column laid out over encoded columns [offset, offset + width).
struct ColumnEncoding {
  std::string name;
  ColumnKind kind = ColumnKind::kBinary;
  std::size_t offset = 0;
  std::size_t width = 0;
  std::vector<std::string> levels;  // categorical
  std::vector<double> edges;        // continuous: interior edges, ascending, distinct
};

struct DecodedCell {
  std::size_t index = 0;  // bit value, level index or bin index
  std::string label;      // "0"/"1", the level, or "[lo, hi)"
};

/// Map from source columns to encoded binary columns.
///
/// Binary columns take one encoded column. Categorical columns are one-hot in
/// first-appearance order. Continuous columns are one-hot over quantile bins:
/// bin b holds values v with edge[b-1] <= v < edge[b], so a value equal to an
/// edge goes to the upper bin and the first and last bins are open-ended.
class Encoding {
 public:
  Encoding() = default;
  explicit Encoding(std::vector<ColumnEncoding> columns);

  std::size_t width() const noexcept { return width_; }
  const std::vector<ColumnEncoding>& columns() const noexcept { return columns_; }
  std::vector<std::string> encoded_names() const;

  /// Bin of a continuous value under the given interior edges.
  static std::size_t bin_of(std::span<const double> edges, double v);

  /// Encodes one raw row given in column order. Unknown categorical levels are
  /// appended to their group under kAppend, which widens the encoding and
  /// shifts later offsets; a warning is pushed for each. `where` prefixes
  /// SchemaError messages.
  PointVector encode_row(std::span<const std::string> cells, UnknownLevelPolicy policy,
                         std::vector<std::string>* warnings, const std::string& where = "");

  /// Inverse of encode_row on valid encodings. Throws InvalidArgument when a
  /// group does not have exactly one hot bit.
  std::vector<DecodedCell> decode_row(const PointVector& x) const;

  nlohmann::json to_json() const;
  static Encoding from_json(const nlohmann::json& doc);

 private:
  void relayout();

  std::vector<ColumnEncoding> columns_;
  std::size_t width_ = 0;
};

/// Equal-population interior edges over the sorted unique values: with m
/// unique values u, edge j (j = 1..bins-1) is u[ceil(j * m / bins)]. Repeated
/// or out-of-range edges are dropped, which leaves some bins empty when there
/// are fewer unique values than bins.
std::vector<double> quantile_edges(std::vector<double> values, std::size_t bins);

struct RawRow {
  std::size_t line = 0;
  std::vector<std::string> cells;  // schema order
};

class TabularDataset {
 public:
  TabularDataset(Schema schema, std::vector<RawRow> rows, Encoding encoding,
                 std::vector<PointVector> points, std::vector<std::string> warnings);

  const Schema& schema() const noexcept { return schema_; }
  const std::vector<RawRow>& rows() const noexcept { return rows_; }
  const Encoding& encoding() const noexcept { return encoding_; }
  const std::vector<PointVector>& points() const noexcept { return points_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  std::size_t size() const noexcept { return points_.size(); }
  std::size_t n() const noexcept { return encoding_.width(); }

 private:
  Schema schema_;
  std::vector<RawRow> rows_;
  Encoding encoding_;
  std::vector<PointVector> points_;
  std::vector<std::string> warnings_;
};

/// Parses and encodes a CSV whose header names exactly the schema columns (in
/// any order). Encoded columns follow schema order.
TabularDataset load_csv(const std::filesystem::path& path, const Schema& schema);

struct EncodedQueries {
  std::vector<PointVector> points;
  std::vector<std::string> warnings;
};

/// Encodes a CSV of raw rows against an existing encoding. Under kAppend the
/// encoding may grow; callers then compare its width with the model's.
EncodedQueries encode_csv(const std::filesystem::path& path, Encoding& encoding,
                          UnknownLevelPolicy policy = UnknownLevelPolicy::kAppend);

enum class BackgroundStrategy { kFirstRows, kRandom };

struct BackgroundSpec {
  BackgroundStrategy strategy = BackgroundStrategy::kFirstRows;
  std::size_t size = 0;
  std::uint64_t seed = 0;
};

/// Dataset row indices of the selection. kRandom takes the first `size`
/// positions of a Fisher-Yates shuffle keyed by the seed.
std::vector<std::size_t> background_indices(std::size_t rows, const BackgroundSpec& spec);
BackgroundDataset select_background(const TabularDataset& ds, const BackgroundSpec& spec);

/// Sum of member attributions per source column.
struct GroupAttribution {
  std::string name;
  double phi = 0.0;
};
std::vector<GroupAttribution> aggregate_groups(const Encoding& encoding,
                                               std::span<const double> phi);

}  // namespace fshap
