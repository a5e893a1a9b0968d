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

#include "numcomp/cell.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <map>

#include "json.hpp"

#include "numcomp/text.hpp"

namespace numcomp {
namespace {

constexpr std::string_view kMinusSign = "\xE2\x88\x92";  // U+2212
constexpr std::string_view kPlusMinus = "\xC2\xB1";      // U+00B1

// Longest delimiters first so "--" is never read as "-" followed by a sign.
constexpr std::array<std::string_view, 4> kRangeDelims = {"--", "\xE2\x80\x93", "\xE2\x80\x94",
                                                          "-"};
constexpr std::array<std::string_view, 3> kGaussDelims = {kPlusMinus, "+/-", "+-"};
constexpr std::array<std::string_view, 3> kCurrency = {"$", "\xE2\x82\xAC", "\xC2\xA3"};

bool starts_with(std::string_view text, std::size_t pos, std::string_view prefix) {
  return text.substr(pos, prefix.size()) == prefix;
}

void skip_spaces(std::string_view text, std::size_t& pos) {
  while (pos < text.size() && is_space(text[pos])) ++pos;
}

bool number_starts_at(std::string_view text, std::size_t pos) {
  std::size_t p = pos;
  if (starts_with(text, p, "-")) {
    ++p;
  } else if (starts_with(text, p, kMinusSign)) {
    p += kMinusSign.size();
  }
  if (p < text.size() && is_digit(text[p])) return true;
  return p + 1 < text.size() && text[p] == '.' && is_digit(text[p + 1]);
}

std::optional<std::string_view> match_any(std::string_view text, std::size_t pos,
                                          std::span<const std::string_view> options) {
  for (std::string_view opt : options) {
    if (starts_with(text, pos, opt)) return opt;
  }
  return std::nullopt;
}

ParsedCell text_cell(std::string attribute, std::string_view raw,
                     std::optional<std::string> unit) {
  return ParsedCell{std::move(attribute), Text{std::string(raw)}, std::move(unit)};
}

}  // namespace

std::string_view to_string(KindTag tag) {
  switch (tag) {
    case KindTag::Scalar: return "scalar";
    case KindTag::Range: return "range";
    case KindTag::Gaussian: return "gaussian";
    case KindTag::Text: return "text";
  }
  return "text";
}

KindTag kind_tag(const NumericKind& kind) { return static_cast<KindTag>(kind.index()); }

std::optional<double> scan_number(std::string_view text, std::size_t& pos, bool& malformed) {
  malformed = false;
  if (!number_starts_at(text, pos)) return std::nullopt;
  std::size_t p = pos;
  std::string digits;
  if (starts_with(text, p, "-")) {
    digits.push_back('-');
    ++p;
  } else if (starts_with(text, p, kMinusSign)) {
    digits.push_back('-');
    p += kMinusSign.size();
  }
  std::size_t run = 0;
  while (p < text.size() && is_digit(text[p])) {
    digits.push_back(text[p++]);
    ++run;
  }
  // Thousands groups: a comma is a separator only when exactly three digits
  // follow it and the leading group has one to three digits.
  bool grouped = false;
  while (p < text.size() && text[p] == ',' && p + 1 < text.size() && is_digit(text[p + 1])) {
    std::size_t q = p + 1;
    while (q < text.size() && is_digit(text[q])) ++q;
    if (q - (p + 1) != 3 || (!grouped && (run == 0 || run > 3))) {
      malformed = true;
      return std::nullopt;
    }
    digits.append(text.substr(p + 1, 3));
    grouped = true;
    p = q;
  }
  if (p + 1 < text.size() && text[p] == '.' && is_digit(text[p + 1])) {
    digits.push_back('.');
    ++p;
    while (p < text.size() && is_digit(text[p])) digits.push_back(text[p++]);
  }
  if (p < text.size() && (text[p] == 'e' || text[p] == 'E')) {
    std::size_t q = p + 1;
    if (q < text.size() && (text[q] == '+' || text[q] == '-')) ++q;
    if (q < text.size() && is_digit(text[q])) {
      digits.append(text.substr(p, q - p));
      while (q < text.size() && is_digit(text[q])) digits.push_back(text[q++]);
      p = q;
    }
  }
  const double value = std::strtod(digits.c_str(), nullptr);
  if (!std::isfinite(value)) {
    malformed = true;
    return std::nullopt;
  }
  pos = p;
  return value;
}

std::optional<std::string> canonicalize_unit(std::string_view surface, const UnitTable& units) {
  return units.canonicalize(surface);
}

std::optional<std::string> header_unit(std::string_view header, const UnitTable& units) {
  const std::string_view h = trim(header);
  if (h.empty()) return std::nullopt;
  const char close = h.back();
  if (close == ')' || close == ']') {
    const char open = close == ')' ? '(' : '[';
    const auto at = h.rfind(open);
    if (at != std::string_view::npos) {
      return units.canonicalize(h.substr(at + 1, h.size() - at - 2));
    }
    return std::nullopt;
  }
  if (const auto comma = h.rfind(','); comma != std::string_view::npos) {
    return units.canonicalize(h.substr(comma + 1));
  }
  return std::nullopt;
}

std::string attribute_name(std::string_view header, const UnitTable& units) {
  const std::string_view h = trim(header);
  if (!header_unit(h, units)) return std::string(h);
  const char close = h.back();
  const auto at = close == ')' ? h.rfind('(') : close == ']' ? h.rfind('[') : h.rfind(',');
  const std::string_view stripped = trim(h.substr(0, at));
  return stripped.empty() ? std::string(h) : std::string(stripped);
}

ParsedCell parse_cell(std::string_view raw, std::string_view header, const UnitTable& units) {
  std::string attribute(trim(header));
  const std::string_view s = trim(raw);
  const std::optional<std::string> from_header = header_unit(attribute, units);
  if (s.empty()) return text_cell(std::move(attribute), s, from_header);

  std::size_t pos = 0;
  std::optional<std::string_view> prefix = match_any(s, 0, kCurrency);
  if (prefix) {
    pos += prefix->size();
    skip_spaces(s, pos);
  }
  bool malformed = false;
  const auto first = scan_number(s, pos, malformed);
  if (!first) return text_cell(std::move(attribute), s, from_header);

  NumericKind kind = Scalar{*first};
  std::size_t after_first = pos;
  skip_spaces(s, pos);
  if (auto delim = match_any(s, pos, kGaussDelims)) {
    pos += delim->size();
    skip_spaces(s, pos);
    const auto sd = scan_number(s, pos, malformed);
    if (!sd || *sd < 0.0) return text_cell(std::move(attribute), s, from_header);
    kind = Gaussian{*first, *sd};
  } else if (auto delim = match_any(s, pos, kRangeDelims)) {
    std::size_t p = pos + delim->size();
    skip_spaces(s, p);
    const auto second = scan_number(s, p, malformed);
    if (!second) {
      if (malformed) return text_cell(std::move(attribute), s, from_header);
      // Not a range; let the suffix check below decide (e.g. "5-ish" is Text).
      pos = after_first;
    } else {
      if (*first > *second) return text_cell(std::move(attribute), s, from_header);
      kind = Range{*first, *second};
      pos = p;
    }
  }

  const std::string_view rest = trim(s.substr(pos));
  std::optional<std::string> unit;
  if (prefix) unit = units.canonicalize(*prefix);
  if (!rest.empty()) {
    auto suffix = units.canonicalize(rest);
    if (!suffix || (unit && *unit != *suffix)) {
      return text_cell(std::move(attribute), s, from_header);
    }
    unit = std::move(suffix);
  }
  if (!unit) unit = from_header;
  return ParsedCell{std::move(attribute), std::move(kind), std::move(unit)};
}

std::optional<std::string> infer_unit(std::span<const ParsedCell> column_cells) {
  std::vector<std::pair<std::string, int>> counts;  // first-occurrence order
  for (const ParsedCell& cell : column_cells) {
    if (!cell.unit) continue;
    auto it = std::find_if(counts.begin(), counts.end(),
                           [&](const auto& entry) { return entry.first == *cell.unit; });
    if (it == counts.end()) {
      counts.emplace_back(*cell.unit, 1);
    } else {
      ++it->second;
    }
  }
  if (counts.empty()) return std::nullopt;
  // max_element returns the first maximum, which is the tie-break we want.
  return std::max_element(counts.begin(), counts.end(),
                          [](const auto& a, const auto& b) { return a.second < b.second; })
      ->first;
}

std::string to_json_line(const ParsedCell& cell) {
  nlohmann::ordered_json j;
  j["attr"] = cell.attribute;
  j["kind"] = std::string(to_string(cell.tag()));
  nlohmann::ordered_json payload = nlohmann::ordered_json::array();
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Scalar>) {
          payload.push_back(k.x);
        } else if constexpr (std::is_same_v<K, Range>) {
          payload.push_back(k.lo);
          payload.push_back(k.hi);
        } else if constexpr (std::is_same_v<K, Gaussian>) {
          payload.push_back(k.mean);
          payload.push_back(k.sd);
        } else {
          payload.push_back(k.raw);
        }
      },
      cell.kind);
  j["payload"] = std::move(payload);
  j["unit"] = cell.unit ? nlohmann::ordered_json(*cell.unit) : nlohmann::ordered_json(nullptr);
  return j.dump();
}

namespace {

Piece numeral_piece(std::string_view raw_digits, double value, bool glued) {
  std::string text;
  for (char c : raw_digits) {
    if (c != ',') text.push_back(c);
  }
  text = replace_all(std::move(text), kMinusSign, "-");
  return Piece{std::move(text), true, value, glued};
}

void lex_word(std::string_view word, std::vector<Piece>& out) {
  const std::size_t first_piece = out.size();
  auto glued = [&] { return out.size() > first_piece; };
  std::size_t pos = 0;
  if (auto cur = match_any(word, 0, kCurrency); cur && number_starts_at(word, cur->size())) {
    out.push_back(Piece{std::string(*cur), false, 0.0, false});
    pos = cur->size();
  }
  while (pos < word.size()) {
    bool malformed = false;
    const std::size_t start = pos;
    const auto value = scan_number(word, pos, malformed);
    if (!value) {
      if (!glued()) {
        out.push_back(Piece{std::string(word), false, 0.0, false});
      } else {
        out.push_back(Piece{std::string(word.substr(start)), false, 0.0, true});
      }
      return;
    }
    out.push_back(numeral_piece(word.substr(start, pos - start), *value, glued()));
    if (pos == word.size()) return;
    std::optional<std::string_view> delim = match_any(word, pos, kGaussDelims);
    if (!delim) delim = match_any(word, pos, kRangeDelims);
    if (delim && number_starts_at(word, pos + delim->size())) {
      out.push_back(Piece{std::string(*delim), false, 0.0, true});
      pos += delim->size();
      continue;
    }
    out.push_back(Piece{std::string(word.substr(pos)), false, 0.0, true});
    return;
  }
}

}  // namespace

std::vector<Piece> lex_text(std::string_view text) {
  std::vector<Piece> out;
  for (const std::string& word : split_whitespace(text)) {
    const std::size_t before = out.size();
    lex_word(word, out);
    if (out.size() > before) out[before].glued = false;
  }
  return out;
}

}  // namespace numcomp
