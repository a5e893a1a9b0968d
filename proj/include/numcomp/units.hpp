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

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace numcomp {

enum class DimensionClass {
  Length,
  Mass,
  Time,
  Volume,
  Concentration,
  Temperature,
  Pressure,
  Ratio,
  Count,
  Other,
};

std::string_view to_string(DimensionClass dim);
std::optional<DimensionClass> parse_dimension(std::string_view name);

struct UnitEntry {
  std::string canonical;
  DimensionClass dimension = DimensionClass::Other;
};

/// Surface spelling -> canonical unit symbol. Lookups try the exact spelling
/// first and then a case-folded key, so "mM" (millimolar) and "mm" stay apart
/// while "ML" still resolves to "mL".
class UnitTable {
 public:
  /// The shipped seed table (biomedical and physical units).
  static UnitTable seed();
  /// Parses the `surface<TAB>canonical` format with `#dim: <class>` headers.
  static UnitTable parse(std::istream& in);
  static UnitTable load(const std::string& path);

  /// Adds a mapping; the canonical symbol is registered as its own surface.
  void add(std::string_view surface, std::string_view canonical, DimensionClass dim);
  /// Entries of `other` override entries of this table.
  void merge(const UnitTable& other);

  std::optional<std::string> canonicalize(std::string_view surface) const;
  std::optional<DimensionClass> dimension(std::string_view canonical) const;

  /// Canonical symbols in insertion order.
  const std::vector<std::string>& canonical_symbols() const { return canonicals_; }
  std::size_t surface_count() const { return exact_.size(); }

  /// Serializes to the text format accepted by parse().
  std::string to_text() const;

 private:
  std::unordered_map<std::string, UnitEntry> exact_;
  std::unordered_map<std::string, UnitEntry> folded_;
  std::unordered_map<std::string, DimensionClass> dims_;
  std::vector<std::string> canonicals_;
  std::vector<std::pair<std::string, std::string>> order_;  // (surface, canonical)
};

/// Case/spacing-insensitive lookup key.
std::string fold_unit_key(std::string_view surface);

/// The seed table in its on-disk text form.
std::string_view seed_unit_table_text();

}  // namespace numcomp
