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
#include "numcomp/csv.hpp"

using namespace numcomp;

TEST_CASE("quoted fields, BOM and padding") {
  std::istringstream in("\xEF\xBB\xBFname,value\n\"a, b\",\"3,000\"\n\"say \"\"hi\"\"\"\nc,\"multi\nline\"\n");
  const Table t = parse_csv(in, ',', "demo");
  CHECK(t.name == "demo");
  CHECK(t.headers == std::vector<std::string>{"name", "value"});
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0] == std::vector<std::string>{"a, b", "3,000"});
  CHECK(t.rows[1] == std::vector<std::string>{"say \"hi\"", ""});
  CHECK(t.rows[2][1] == "multi\nline");
}

TEST_CASE("write then parse round-trips") {
  Table t;
  t.name = "rt";
  t.headers = {"a", "b;c"};
  t.rows = {{"1", "x\"y"}, {"", "2,5"}};
  for (char delim : {',', ';', '\t'}) {
    std::stringstream io;
    write_csv(io, t, delim);
    const Table back = parse_csv(io, delim, "rt");
    CHECK(back.headers == t.headers);
    CHECK(back.rows == t.rows);
  }
}

TEST_CASE("CRLF line endings") {
  std::istringstream in("a,b\r\n1,2\r\n");
  const Table t = parse_csv(in);
  CHECK(t.headers == std::vector<std::string>{"a", "b"});
  CHECK(t.rows.at(0) == std::vector<std::string>{"1", "2"});
}
