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

#include <iosfwd>
#include <string>
#include <vector>

namespace numcomp {

/// A CSV table with a single header row. Short rows are padded with empty
/// cells; long rows are an error.
struct Table {
  std::string name;
  std::vector<std::string> headers;
  std::vector<std::vector<std::string>> rows;

  std::size_t column_count() const { return headers.size(); }
  std::vector<std::string> column(std::size_t j) const;
};

/// RFC 4180 quoting: fields may be wrapped in double quotes, "" escapes a quote.
Table parse_csv(std::istream& in, char delimiter = ',', std::string name = {});
Table read_csv(const std::string& path, char delimiter = ',');
void write_csv(std::ostream& out, const Table& table, char delimiter = ',');

}  // namespace numcomp
