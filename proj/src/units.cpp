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

#include "numcomp/units.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "numcomp/error.hpp"
#include "numcomp/text.hpp"

namespace numcomp {
namespace {

constexpr std::array<std::pair<DimensionClass, std::string_view>, 10> kDimNames = {{
    {DimensionClass::Length, "length"},
    {DimensionClass::Mass, "mass"},
    {DimensionClass::Time, "time"},
    {DimensionClass::Volume, "volume"},
    {DimensionClass::Concentration, "concentration"},
    {DimensionClass::Temperature, "temperature"},
    {DimensionClass::Pressure, "pressure"},
    {DimensionClass::Ratio, "ratio"},
    {DimensionClass::Count, "count"},
    {DimensionClass::Other, "other"},
}};

// Exact key: trimmed, inner whitespace removed, micro sign unified.
std::string exact_unit_key(std::string_view surface) {
  std::string key;
  const std::string unified = replace_all(std::string(trim(surface)), "\xCE\xBC", "\xC2\xB5");
  key.reserve(unified.size());
  for (char c : unified) {
    if (!is_space(c)) key.push_back(c);
  }
  return key;
}

}  // namespace

std::string_view to_string(DimensionClass dim) {
  for (const auto& [d, name] : kDimNames) {
    if (d == dim) return name;
  }
  return "other";
}

std::optional<DimensionClass> parse_dimension(std::string_view name) {
  const std::string key = to_lower(trim(name));
  for (const auto& [d, n] : kDimNames) {
    if (n == key) return d;
  }
  return std::nullopt;
}

std::string fold_unit_key(std::string_view surface) {
  return to_lower(exact_unit_key(surface));
}

void UnitTable::add(std::string_view surface, std::string_view canonical, DimensionClass dim) {
  const std::string canon(trim(canonical));
  if (canon.empty() || trim(surface).empty()) {
    fail(ErrorCode::InvalidArgument, "unit table entry with empty surface or canonical form");
  }
  UnitEntry entry{canon, dim};
  if (!dims_.count(canon)) {
    canonicals_.push_back(canon);
  }
  dims_[canon] = dim;
  for (std::string_view s : {std::string_view(canon), surface}) {
    const std::string key = exact_unit_key(s);
    if (!exact_.count(key)) {
      order_.emplace_back(std::string(trim(s)), canon);
    } else {
      for (auto& [existing, target] : order_) {
        if (exact_unit_key(existing) == key) target = canon;
      }
    }
    exact_[key] = entry;
    // The first registration of a folded key wins, so later case variants of
    // a different unit ("mM" after "mm") cannot steal the folded lookup.
    folded_.try_emplace(fold_unit_key(s), entry);
  }
}

void UnitTable::merge(const UnitTable& other) {
  for (const auto& [surface, canonical] : other.order_) {
    const std::string key = exact_unit_key(surface);
    add(surface, canonical, other.dims_.at(canonical));
    // Overrides also replace the folded entry.
    folded_[fold_unit_key(surface)] = exact_.at(key);
  }
}

std::optional<std::string> UnitTable::canonicalize(std::string_view surface) const {
  const std::string key = exact_unit_key(surface);
  if (key.empty()) return std::nullopt;
  if (auto it = exact_.find(key); it != exact_.end()) return it->second.canonical;
  if (auto it = folded_.find(to_lower(key)); it != folded_.end()) return it->second.canonical;
  return std::nullopt;
}

std::optional<DimensionClass> UnitTable::dimension(std::string_view canonical) const {
  if (auto it = dims_.find(std::string(canonical)); it != dims_.end()) return it->second;
  return std::nullopt;
}

UnitTable UnitTable::parse(std::istream& in) {
  UnitTable table;
  DimensionClass current = DimensionClass::Other;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      constexpr std::string_view kDim = "#dim:";
      if (view.substr(0, kDim.size()) == kDim) {
        auto dim = parse_dimension(view.substr(kDim.size()));
        if (!dim) {
          fail(ErrorCode::CorruptFile,
               "unknown dimension class on unit table line " + std::to_string(line_no));
        }
        current = *dim;
      }
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      fail(ErrorCode::CorruptFile,
           "expected surface<TAB>canonical on unit table line " + std::to_string(line_no));
    }
    table.add(std::string_view(line).substr(0, tab), std::string_view(line).substr(tab + 1),
              current);
  }
  return table;
}

UnitTable UnitTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open unit table " + path);
  return parse(in);
}

UnitTable UnitTable::seed() {
  static const UnitTable table = [] {
    std::istringstream in{std::string(seed_unit_table_text())};
    return parse(in);
  }();
  return table;
}

std::string UnitTable::to_text() const {
  std::ostringstream out;
  for (const auto& [d, name] : kDimNames) {
    bool header = false;
    for (const auto& [surface, canonical] : order_) {
      if (dims_.at(canonical) != d) continue;
      if (!header) {
        out << "#dim: " << name << '\n';
        header = true;
      }
      out << surface << '\t' << canonical << '\n';
    }
  }
  return out.str();
}

}  // namespace numcomp
