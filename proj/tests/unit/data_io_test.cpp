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

#include <gtest/gtest.h>

#include <set>

#include <nlohmann/json.hpp>

#include "fshap/csv.hpp"
#include "fshap/data_io.hpp"
#include "fshap/error.hpp"
#include "test_util.hpp"

namespace fshap {
namespace {

using nlohmann::json;

Schema one_column(const std::string& name, ColumnKind kind, std::size_t bins = 4) {
  return {ColumnSchema{name, kind, bins, {}}};
}

std::size_t hot_in(const PointVector& x, std::size_t offset, std::size_t width) {
  std::size_t c = 0;
  for (std::size_t j = offset; j < offset + width; ++j) c += x.test(j);
  return c;
}

TEST(Csv, QuotedFieldsAndBlankLines) {
  const auto t = csv::parse("a,b\n\n\"x,1\",\"say \"\"hi\"\"\"\n\"multi\nline\",2\n");
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0].cells[0], "x,1");
  EXPECT_EQ(t.rows[0].cells[1], "say \"hi\"");
  EXPECT_EQ(t.rows[0].line, 3u);
  EXPECT_EQ(t.rows[1].cells[0], "multi\nline");
}

TEST(Csv, RaggedRowIsSchemaError) {
  try {
    csv::parse("a,b\n1,2\n3\n");
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.where(), "line 3");
  }
}

TEST(Csv, EscapeAndFormat) {
  EXPECT_EQ(csv::escape("plain"), "plain");
  EXPECT_EQ(csv::escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv::escape("q\""), "\"q\"\"\"");
  EXPECT_EQ(csv::format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(csv::format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Schema, ParsesAndValidates) {
  const auto s = read_schema(testing::data_path("mixed_schema.json"));
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[2].kind, ColumnKind::kContinuous);
  EXPECT_EQ(s[2].bins, 4u);
  EXPECT_THROW(schema_from_json(json::array()), SchemaError);
  EXPECT_THROW(schema_from_json(json::parse(R"([{"name":"a","kind":"binary","bins":3}])")),
               SchemaError);
  EXPECT_THROW(schema_from_json(json::parse(R"([{"name":"a","kind":"text"}])")), SchemaError);
  EXPECT_THROW(schema_from_json(json::parse(R"([{"name":"a","kind":"binary"},{"name":"a","kind":"binary"}])")),
               SchemaError);
  EXPECT_THROW(schema_from_json(json::parse(R"([{"name":"a","kind":"continuous","bins":0}])")),
               SchemaError);
  try {
    schema_from_json(json::parse(R"([{"name":"a","kind":"binary"},{"kind":"binary"}])"));
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.where(), "/1/name");
  }
}

TEST(LoadCsv, SingleBinaryColumnIsIdentity) {
  const auto ds = load_csv(testing::data_path("binary.csv"), one_column("b", ColumnKind::kBinary));
  EXPECT_EQ(ds.n(), 1u);
  ASSERT_EQ(ds.size(), 4u);
  const int want[] = {0, 1, 1, 0};
  for (std::size_t r = 0; r < 4; ++r) EXPECT_EQ(ds.points()[r].test(0), want[r] == 1);
}

TEST(LoadCsv, FourteenLevelCategorical) {
  const auto ds = load_csv(testing::data_path("cat14.csv"), one_column("level", ColumnKind::kCategorical));
  EXPECT_EQ(ds.n(), 14u);
  const auto& col = ds.encoding().columns()[0];
  EXPECT_EQ(col.levels[0], "L00");
  EXPECT_EQ(col.levels[1], "L05");  // first appearance order
  for (const auto& x : ds.points()) EXPECT_EQ(x.popcount(), 1u);
}

TEST(LoadCsv, ContinuousQuantileBins) {
  const auto ds = load_csv(testing::data_path("cont8.csv"), one_column("x", ColumnKind::kContinuous));
  EXPECT_EQ(ds.n(), 4u);
  EXPECT_EQ(ds.encoding().columns()[0].edges, (std::vector<double>{3.0, 5.0, 7.0}));
  const std::size_t want[] = {1, 0, 3, 0, 0, 2, 3, 1, 2, 0};
  for (std::size_t r = 0; r < ds.size(); ++r) {
    EXPECT_EQ(ds.points()[r].popcount(), 1u);
    EXPECT_TRUE(ds.points()[r].test(want[r])) << "row " << r;
  }
}

TEST(QuantileEdges, TiesNeverSplit) {
  EXPECT_EQ(quantile_edges({1, 1, 1, 1}, 4), std::vector<double>{});
  // Edges come from the distinct values, so repeats carry no extra weight.
  EXPECT_EQ(quantile_edges({1, 2, 2, 2, 2, 2, 3}, 2), (std::vector<double>{3.0}));
  EXPECT_EQ(quantile_edges({5, 1, 3}, 8), (std::vector<double>{3.0, 5.0}));
  EXPECT_EQ(Encoding::bin_of(std::vector<double>{3.0, 5.0}, 3.0), 1u);
  EXPECT_EQ(Encoding::bin_of(std::vector<double>{3.0, 5.0}, 2.999), 0u);
  EXPECT_EQ(Encoding::bin_of(std::vector<double>{3.0, 5.0}, 9.0), 2u);
}

TEST(LoadCsv, MixedSchemaWidthAndOneHotGroups) {
  const auto ds = load_csv(testing::data_path("mixed.csv"), read_schema(testing::data_path("mixed_schema.json")));
  EXPECT_EQ(ds.size(), 120u);
  EXPECT_EQ(ds.n(), 8u);  // 1 + 3 + 4
  const auto names = ds.encoding().encoded_names();
  EXPECT_EQ(names.front(), "flag");
  for (const auto& x : ds.points()) {
    for (const auto& c : ds.encoding().columns()) {
      if (c.kind != ColumnKind::kBinary) EXPECT_EQ(hot_in(x, c.offset, c.width), 1u) << c.name;
    }
  }
}

TEST(LoadCsv, DecodeRoundTrip) {
  const auto ds = load_csv(testing::data_path("mixed.csv"), read_schema(testing::data_path("mixed_schema.json")));
  const auto& enc = ds.encoding();
  for (std::size_t r = 0; r < ds.size(); ++r) {
    const auto decoded = enc.decode_row(ds.points()[r]);
    const auto& cells = ds.rows()[r].cells;
    for (std::size_t c = 0; c < enc.columns().size(); ++c) {
      const auto& col = enc.columns()[c];
      if (col.kind == ColumnKind::kContinuous) {
        EXPECT_EQ(decoded[c].index, Encoding::bin_of(col.edges, std::stod(cells[c])));
      } else {
        EXPECT_EQ(decoded[c].label, cells[c]);
      }
    }
  }
  EXPECT_THROW(enc.decode_row(PointVector(8)), InvalidArgument);
  EXPECT_EQ(Encoding::from_json(enc.to_json()).to_json(), enc.to_json());
}

TEST(LoadCsv, MalformedNumberNamesLine) {
  try {
    load_csv(testing::data_path("bad_number.csv"), read_schema(testing::data_path("mixed_schema.json")));
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
}

TEST(LoadCsv, HeaderMustMatchSchema) {
  EXPECT_THROW(load_csv(testing::data_path("binary.csv"), one_column("other", ColumnKind::kBinary)),
               SchemaError);
  const auto dir = testing::temp_dir("binval");
  testing::write_text(dir / "b.csv", "b\n0\n2\n");
  EXPECT_THROW(load_csv(dir / "b.csv", one_column("b", ColumnKind::kBinary)), SchemaError);
}

TEST(LoadCsv, PredeclaredLevelsKeepOrder) {
  Schema s{ColumnSchema{"level", ColumnKind::kCategorical, 4, {"L13", "L00"}}};
  const auto ds = load_csv(testing::data_path("cat14.csv"), s);
  const auto& levels = ds.encoding().columns()[0].levels;
  EXPECT_EQ(levels[0], "L13");
  EXPECT_EQ(levels[1], "L00");
  EXPECT_EQ(levels.size(), 14u);
  EXPECT_FALSE(ds.warnings().empty());
}

TEST(EncodeCsv, UnknownLevelPolicy) {
  auto ds = load_csv(testing::data_path("mixed.csv"), read_schema(testing::data_path("mixed_schema.json")));
  auto enc = ds.encoding();
  const auto known = encode_csv(testing::data_path("mixed_queries.csv"), enc);
  EXPECT_EQ(known.points.size(), 5u);
  EXPECT_TRUE(known.warnings.empty());
  EXPECT_EQ(enc.width(), 8u);

  auto strict = ds.encoding();
  EXPECT_THROW(encode_csv(testing::data_path("mixed_queries_unknown.csv"), strict,
                          UnknownLevelPolicy::kError),
               SchemaError);
  const auto grown = encode_csv(testing::data_path("mixed_queries_unknown.csv"), enc);
  EXPECT_EQ(enc.width(), 9u);
  ASSERT_EQ(grown.warnings.size(), 1u);
  EXPECT_NE(grown.warnings[0].find("purple"), std::string::npos);
  for (const auto& x : grown.points) EXPECT_EQ(x.size(), 9u);
  EXPECT_EQ(encode_csv(testing::data_path("mixed_queries_empty.csv"), enc).points.size(), 0u);
}

TEST(Background, FirstRowsWholeDataset) {
  const auto ds = load_csv(testing::data_path("mixed.csv"), read_schema(testing::data_path("mixed_schema.json")));
  const auto bg = select_background(ds, {BackgroundStrategy::kFirstRows, ds.size(), 0});
  ASSERT_EQ(bg.size(), ds.size());
  for (std::size_t r = 0; r < bg.size(); ++r) EXPECT_EQ(bg[r], ds.points()[r]);
}

TEST(Background, RandomIsSeededAndDistinct) {
  const BackgroundSpec a{BackgroundStrategy::kRandom, 10, 1};
  const auto first = background_indices(120, a);
  EXPECT_EQ(first, background_indices(120, a));
  EXPECT_NE(first, background_indices(120, {BackgroundStrategy::kRandom, 10, 2}));
  std::set<std::size_t> uniq(first.begin(), first.end());
  EXPECT_EQ(uniq.size(), 10u);
  for (auto i : first) EXPECT_LT(i, 120u);
  const auto ds = load_csv(testing::data_path("mixed.csv"), read_schema(testing::data_path("mixed_schema.json")));
  const auto b1 = select_background(ds, a);
  const auto b2 = select_background(ds, {BackgroundStrategy::kRandom, 10, 2});
  EXPECT_NE(b1.points(), b2.points());
}

TEST(Background, SizeGuards) {
  EXPECT_THROW(background_indices(5, {BackgroundStrategy::kFirstRows, 6, 0}), InvalidArgument);
  EXPECT_THROW(background_indices(5, {BackgroundStrategy::kRandom, 0, 0}), InvalidArgument);
}

TEST(Groups, SumMemberAttributions) {
  const auto ds = load_csv(testing::data_path("mixed.csv"), read_schema(testing::data_path("mixed_schema.json")));
  std::vector<double> phi(8);
  for (std::size_t j = 0; j < 8; ++j) phi[j] = static_cast<double>(j + 1);
  const auto groups = aggregate_groups(ds.encoding(), phi);
  ASSERT_EQ(groups.size(), 3u);
  double total = 0.0;
  for (const auto& gpa : groups) total += gpa.phi;
  EXPECT_EQ(total, 36.0);
  EXPECT_EQ(groups[0].name, "flag");
  EXPECT_EQ(groups[0].phi, 1.0);
  EXPECT_EQ(groups[1].phi, 2.0 + 3.0 + 4.0);
  EXPECT_THROW(aggregate_groups(ds.encoding(), std::vector<double>(7)), DimensionError);
}

}  // namespace
}  // namespace fshap
