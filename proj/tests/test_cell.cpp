/*
 * Copyright 2026 The numcomp Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <sstream>

#include "doctest.h"
#include "numcomp/cell.hpp"
#include "numcomp/csv.hpp"
#include "numcomp/pipeline.hpp"

using namespace numcomp;

namespace {

const UnitTable& units() {
  static const UnitTable table = UnitTable::seed();
  return table;
}

ParsedCell parse(std::string_view raw, std::string_view header = "") {
  return parse_cell(raw, header, units());
}

}  // namespace

TEST_CASE("scalar with thousands separator and unit suffix") {
  const ParsedCell c = parse("3,000 mL", "Blood loss");
  CHECK(c.kind == NumericKind{Scalar{3000}});
  CHECK(c.unit == "mL");
  CHECK(c.attribute == "Blood loss");
}

TEST_CASE("gaussian takes its unit from the header") {
  const ParsedCell c = parse("21.8 ± 2.9", "BMI (kg/m2)");
  CHECK(c.kind == NumericKind{Gaussian{21.8, 2.9}});
  CHECK(c.unit == "kg/m²");
  CHECK(parse("5 +- 1").kind == NumericKind{Gaussian{5, 1}});
  CHECK(parse("5+/-1").kind == NumericKind{Gaussian{5, 1}});
}

TEST_CASE("ranges") {
  const ParsedCell c = parse("76-118", "BP (mmHg)");
  CHECK(c.kind == NumericKind{Range{76, 118}});
  CHECK(c.unit == "mmHg");
  CHECK(parse("1--5").kind == NumericKind{Range{1, 5}});
  CHECK(parse("1\xE2\x80\x93" "5").kind == NumericKind{Range{1, 5}});
  CHECK(parse("-5--3").kind == NumericKind{Range{-5, 3}});
  CHECK(parse("-5\xE2\x80\x93-3").kind == NumericKind{Range{-5, -3}});
  CHECK(parse("4-4").kind == NumericKind{Range{4, 4}});
  CHECK(parse("10-2").tag() == KindTag::Text);  // reversed bounds
}

TEST_CASE("text fallbacks") {
  CHECK(parse("S1--3", "Tumor Stage").kind == NumericKind{Text{"S1--3"}});
  CHECK(parse("F").tag() == KindTag::Text);
  CHECK(parse("").tag() == KindTag::Text);
  CHECK(parse("5 furlongs").tag() == KindTag::Text);
  CHECK(parse("1,00").tag() == KindTag::Text);
  CHECK(parse("12,3456").tag() == KindTag::Text);
  CHECK(parse("5-ish").tag() == KindTag::Text);
  CHECK(parse("3 ± -1").tag() == KindTag::Text);
}

TEST_CASE("negative scalars and glued units") {
  CHECK(parse("-7").kind == NumericKind{Scalar{-7}});
  CHECK(parse("\xE2\x88\x92" "7").kind == NumericKind{Scalar{-7}});
  const ParsedCell glued = parse("7hrs");
  CHECK(glued.kind == NumericKind{Scalar{7}});
  CHECK(glued.unit == "h");
  CHECK(parse("1,234,567.5").kind == NumericKind{Scalar{1234567.5}});
  CHECK(parse("2.5e3").kind == NumericKind{Scalar{2500}});
}

TEST_CASE("currency prefix is a unit") {
  const ParsedCell c = parse("$1,200");
  CHECK(c.kind == NumericKind{Scalar{1200}});
  CHECK(c.unit.has_value());
}

TEST_CASE("unit canonicalization") {
  CHECK(canonicalize_unit("ml", units()) == "mL");
  CHECK(canonicalize_unit("mL", units()) == "mL");
  CHECK(canonicalize_unit("ML", units()) == "mL");
  CHECK(canonicalize_unit(" hrs ", units()) == "h");
  CHECK_FALSE(canonicalize_unit("furlongs", units()).has_value());
  for (const std::string& canonical : units().canonical_symbols()) {
    CHECK(canonicalize_unit(canonical, units()) == canonical);
  }
}

TEST_CASE("unit table file format and merge") {
  std::istringstream in("#dim:length\nleague\tlea\nleagues\tlea\n");
  UnitTable extra = UnitTable::parse(in);
  CHECK(extra.canonicalize("Leagues") == "lea");
  CHECK(extra.dimension("lea") == DimensionClass::Length);
  UnitTable merged = UnitTable::seed();
  merged.merge(extra);
  CHECK(merged.canonicalize("league") == "lea");
  CHECK(merged.canonicalize("ml") == "mL");
}

TEST_CASE("infer_unit majority and tie-break") {
  auto cell = [](std::optional<std::string> unit) {
    return ParsedCell{"x", Scalar{1}, std::move(unit)};
  };
  std::vector<ParsedCell> majority{cell("mL"), cell("mL"), cell("L"), cell(std::nullopt)};
  CHECK(infer_unit(majority) == "mL");
  std::vector<ParsedCell> none{cell(std::nullopt), cell(std::nullopt)};
  CHECK_FALSE(infer_unit(none).has_value());
  std::vector<ParsedCell> tie{cell("mL"), cell("L")};
  CHECK(infer_unit(tie) == "mL");
  std::vector<ParsedCell> swapped{cell("L"), cell("mL")};
  CHECK(infer_unit(swapped) == "L");
}

TEST_CASE("header units and attribute names") {
  CHECK(header_unit("BP (mmHg)", units()) == "mmHg");
  CHECK(header_unit("Blood loss, mL", units()) == "mL");
  CHECK(header_unit("Weight [kg]", units()) == "kg");
  CHECK_FALSE(header_unit("Tumor Stage", units()).has_value());
  CHECK(attribute_name("BP (mmHg)", units()) == "BP");
  CHECK(attribute_name("Follow-up (months)", units()) == "Follow-up");
  CHECK(attribute_name("Notes (see text)", units()) == "Notes (see text)");
}

TEST_CASE("json line field order") {
  CHECK(to_json_line(parse("76-118", "BP (mmHg)")) ==
        R"J({"attr":"BP (mmHg)","kind":"range","payload":[76.0,118.0],"unit":"mmHg"})J");
  CHECK(to_json_line(parse("F", "Sex")) ==
        R"({"attr":"Sex","kind":"text","payload":["F"],"unit":null})");
}

TEST_CASE("cohort table parses to the expected kinds") {
  const Table t = read_csv(std::string(NUMCOMP_FIXTURES) + "/surgery_cohort.csv");
  REQUIRE(t.rows.size() == 6);
  const IngestedTable in = ingest_table(t, units());
  auto kinds_of = [&](std::size_t j) {
    std::vector<KindTag> tags;
    for (const auto& c : in.columns[j]) tags.push_back(c.tag());
    return tags;
  };
  CHECK(kinds_of(0) == std::vector<KindTag>(6, KindTag::Scalar));
  CHECK(kinds_of(2) == std::vector<KindTag>(6, KindTag::Text));
  CHECK(kinds_of(6) == std::vector<KindTag>(6, KindTag::Range));
  CHECK(kinds_of(7) == std::vector<KindTag>(6, KindTag::Gaussian));
  for (const auto& c : in.columns[6]) CHECK(c.unit == "mmHg");
  for (const auto& c : in.columns[7]) CHECK(c.unit == "kg/m²");
  CHECK(in.columns[3][0].unit == "h");
  CHECK(in.columns[3][1].unit == "min");
  CHECK(in.columns[4][0].kind == NumericKind{Scalar{3000}});
  CHECK(in.columns[4][1].unit == "L");
  CHECK(in.columns[5][0].unit == "mo");
  CHECK(in.attributes[5] == "Follow-up");
}

TEST_CASE("parse_cell is total over odd inputs") {
  for (std::string_view raw : {"--", "-", "±", "1e999", ",", "..5", "$", "5 ±", "1-2-3", "\xFF\xFE"}) {
    CHECK_NOTHROW(parse(raw));
  }
  CHECK(parse("1e999").tag() == KindTag::Text);
}
