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

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "numcomp/units.hpp"

namespace numcomp {

struct Scalar {
  double x = 0.0;
  bool operator==(const Scalar&) const = default;
};
struct Range {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Range&) const = default;
};
struct Gaussian {
  double mean = 0.0;
  double sd = 0.0;
  bool operator==(const Gaussian&) const = default;
};
struct Text {
  std::string raw;
  bool operator==(const Text&) const = default;
};

using NumericKind = std::variant<Scalar, Range, Gaussian, Text>;

enum class KindTag { Scalar, Range, Gaussian, Text };
std::string_view to_string(KindTag tag);
KindTag kind_tag(const NumericKind& kind);

/// One table cell as an (attribute, value, unit) triplet.
struct ParsedCell {
  std::string attribute;
  NumericKind kind;
  std::optional<std::string> unit;

  KindTag tag() const { return kind_tag(kind); }
  bool is_numeric() const { return tag() != KindTag::Text; }
  bool operator==(const ParsedCell&) const = default;
};

/// Never throws: anything that is not a well-formed scalar, range or
/// mean ± sd (with an optional recognized unit) comes back as Text.
ParsedCell parse_cell(std::string_view raw, std::string_view header, const UnitTable& units);

std::optional<std::string> canonicalize_unit(std::string_view surface, const UnitTable& units);

/// Majority canonical unit among cells that carry one; ties go to the unit
/// seen first.
std::optional<std::string> infer_unit(std::span<const ParsedCell> column_cells);

/// Unit declared in a header such as "BP (mmHg)" or "Blood loss, mL".
std::optional<std::string> header_unit(std::string_view header, const UnitTable& units);

/// Header text with a recognized unit annotation removed ("BP (mmHg)" -> "BP").
std::string attribute_name(std::string_view header, const UnitTable& units);

/// Stable-order JSON object: {"attr", "kind", "payload", "unit"}.
std::string to_json_line(const ParsedCell& cell);

// Lexing shared by the serializer and the tokenizer. A cell such as
// "76-118" becomes three pieces 76, -, 118 where the last two are glued to
// their predecessor so that rendering reproduces the original spelling.
struct Piece {
  std::string text;
  bool numeral = false;
  double value = 0.0;
  bool glued = false;
};

std::vector<Piece> lex_text(std::string_view text);

/// Scans a number at `pos` (optional leading minus, thousands groups of
/// exactly three digits, fraction, exponent). Returns nullopt and leaves
/// `pos` untouched when no number starts there; sets `malformed` when the
/// digits are present but the grouping is invalid.
std::optional<double> scan_number(std::string_view text, std::size_t& pos, bool& malformed);

}  // namespace numcomp
