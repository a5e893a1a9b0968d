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

#include <cstdint>
#include <string>
#include <vector>

#include "numcomp/composite.hpp"
#include "numcomp/csv.hpp"
#include "numcomp/metrics.hpp"

namespace numcomp {

/// One kind of column: header synonyms, unit spellings, and a value law.
struct AttributeTemplate {
  std::string name;
  std::vector<std::string> headers;
  /// Surface spellings of one unit; empty for unitless columns.
  std::vector<std::string> unit_surfaces;
  Layout layout = Layout::Scalar;
  /// Scalars and means are drawn uniformly from [low, high]; ranges span
  /// [lo, lo + width] with lo in [low, high]; gaussians use sd = spread.
  double low = 0.0;
  double high = 1.0;
  double spread = 0.0;
  int decimals = 0;
};

struct CorpusSpec {
  std::vector<AttributeTemplate> templates;
  /// Each family is a list of template indices that make up one table schema.
  std::vector<std::vector<int>> families;
  int tables = 40;
  int rows = 6;
  double synonym_rate = 0.6;       // header drawn from the synonym list
  double unit_in_header_rate = 0.4;
  double missing_unit_rate = 0.2;  // unit dropped entirely
  double thousands_rate = 0.5;     // "3,000" spelling for values >= 1000
};

/// 20 templates in 4 families. Families 0/1 and 2/3 are twins: the same
/// headers and units with different magnitudes.
CorpusSpec default_corpus_spec();

struct GeneratedCorpus {
  std::vector<Table> tables;
  GroundTruth columns;  // "<table>.c<j>" -> same-template columns
  GroundTruth tuples;   // "<table>.r<i>" -> rows of same-family tables
  std::map<std::string, std::string> column_templates;
};

/// Table t belongs to family t mod |families|; column order is shuffled per
/// table. Deterministic in (spec, seed).
GeneratedCorpus generate_corpus(const CorpusSpec& spec, std::uint64_t seed);

/// Writes tables/<name>.csv, truth_columns.jsonl and truth_tuples.jsonl.
void write_corpus(const GeneratedCorpus& corpus, const std::string& dir);

std::string column_id(const std::string& table, std::size_t column);
std::string tuple_id(const std::string& table, std::size_t row);

}  // namespace numcomp
