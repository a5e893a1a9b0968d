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

#include "numcomp/csv.hpp"

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>

#include "numcomp/error.hpp"

namespace numcomp {
namespace {

// Reads one record; returns false at end of input. Quoted fields may span lines.
bool read_record(std::istream& in, char delimiter, std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == delimiter) {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (quoted) fail(ErrorCode::InvalidArgument, "unterminated quoted CSV field");
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

bool blank(const std::vector<std::string>& fields) {
  return fields.size() == 1 && fields[0].empty();
}

}  // namespace

std::vector<std::string> Table::column(std::size_t j) const {
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row.at(j));
  return out;
}

Table parse_csv(std::istream& in, char delimiter, std::string name) {
  Table table;
  table.name = std::move(name);
  std::vector<std::string> fields;
  // Strip a UTF-8 byte order mark.
  if (in.peek() == 0xEF) {
    char bom[3];
    in.read(bom, 3);
  }
  while (read_record(in, delimiter, fields)) {
    if (blank(fields)) continue;
    if (table.headers.empty()) {
      table.headers = fields;
      continue;
    }
    if (fields.size() > table.headers.size()) {
      fail(ErrorCode::LengthMismatch, "CSV row " + std::to_string(table.rows.size() + 1) +
                                          " has " + std::to_string(fields.size()) +
                                          " fields; header has " +
                                          std::to_string(table.headers.size()));
    }
    fields.resize(table.headers.size());
    table.rows.push_back(fields);
  }
  if (table.headers.empty()) fail(ErrorCode::EmptyColumn, "CSV has no header row");
  return table;
}

Table read_csv(const std::string& path, char delimiter) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open CSV: " + path);
  return parse_csv(in, delimiter, std::filesystem::path(path).stem().string());
}

void write_csv(std::ostream& out, const Table& table, char delimiter) {
  auto emit = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out << delimiter;
      const std::string& f = fields[i];
      if (f.find_first_of(std::string{delimiter, '"', '\n', '\r'}) == std::string::npos) {
        out << f;
        continue;
      }
      out << '"';
      for (char c : f) {
        if (c == '"') out << '"';
        out << c;
      }
      out << '"';
    }
    out << '\n';
  };
  emit(table.headers);
  for (const auto& row : table.rows) emit(row);
}

}  // namespace numcomp
