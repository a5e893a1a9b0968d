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
#include <iosfwd>
#include <string>
#include <string_view>

#include "numcomp/linalg.hpp"

namespace numcomp::io {

// Little-endian binary primitives. Readers throw CorruptFile on short reads.
void write_u32(std::ostream& out, std::uint32_t v);
void write_u64(std::ostream& out, std::uint64_t v);
void write_f32(std::ostream& out, float v);
void write_f64(std::ostream& out, double v);
void write_string(std::ostream& out, std::string_view s);  // u32 length + bytes
void write_magic(std::ostream& out, std::string_view magic);
/// Shape (u32 rows, u32 cols) followed by row-major float32 values.
void write_matrix(std::ostream& out, const Matrix& m);

std::uint32_t read_u32(std::istream& in);
std::uint64_t read_u64(std::istream& in);
float read_f32(std::istream& in);
double read_f64(std::istream& in);
std::string read_string(std::istream& in);
void expect_magic(std::istream& in, std::string_view magic);
Matrix read_matrix(std::istream& in);
/// Reads a matrix and checks its shape against the expected one.
void read_matrix_into(std::istream& in, Matrix& m);

std::ofstream open_out(const std::string& path);
std::ifstream open_in(const std::string& path);

}  // namespace numcomp::io
