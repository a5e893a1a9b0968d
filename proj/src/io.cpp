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

#include "numcomp/io.hpp"

#include <bit>
#include <fstream>

#include "numcomp/error.hpp"

namespace numcomp::io {
namespace {

template <typename U>
void put(std::ostream& out, U v) {
  char buf[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(buf, sizeof(U));
}

template <typename U>
U get(std::istream& in) {
  unsigned char buf[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(U))) {
    fail(ErrorCode::CorruptFile, "unexpected end of file");
  }
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(buf[i]) << (8 * i);
  return v;
}

}  // namespace

void write_u32(std::ostream& out, std::uint32_t v) { put(out, v); }
void write_u64(std::ostream& out, std::uint64_t v) { put(out, v); }
void write_f32(std::ostream& out, float v) { put(out, std::bit_cast<std::uint32_t>(v)); }
void write_f64(std::ostream& out, double v) { put(out, std::bit_cast<std::uint64_t>(v)); }

void write_string(std::ostream& out, std::string_view s) {
  write_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void write_magic(std::ostream& out, std::string_view magic) {
  out.write(magic.data(), static_cast<std::streamsize>(magic.size()));
}

void write_matrix(std::ostream& out, const Matrix& m) {
  write_u32(out, static_cast<std::uint32_t>(m.rows()));
  write_u32(out, static_cast<std::uint32_t>(m.cols()));
  const double* p = m.data();
  for (Eigen::Index i = 0; i < m.size(); ++i) write_f32(out, static_cast<float>(p[i]));
}

std::uint32_t read_u32(std::istream& in) { return get<std::uint32_t>(in); }
std::uint64_t read_u64(std::istream& in) { return get<std::uint64_t>(in); }
float read_f32(std::istream& in) { return std::bit_cast<float>(get<std::uint32_t>(in)); }
double read_f64(std::istream& in) { return std::bit_cast<double>(get<std::uint64_t>(in)); }

std::string read_string(std::istream& in) {
  const std::uint32_t n = read_u32(in);
  if (n > (1u << 28)) fail(ErrorCode::CorruptFile, "string length out of range");
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), n)) fail(ErrorCode::CorruptFile, "unexpected end of file");
  return s;
}

void expect_magic(std::istream& in, std::string_view magic) {
  std::string got(magic.size(), '\0');
  if (!in.read(got.data(), static_cast<std::streamsize>(got.size())) || got != magic) {
    fail(ErrorCode::CorruptFile, "bad magic; expected " + std::string(magic));
  }
}

Matrix read_matrix(std::istream& in) {
  const std::uint32_t rows = read_u32(in);
  const std::uint32_t cols = read_u32(in);
  if (static_cast<std::uint64_t>(rows) * cols > (1ull << 30)) {
    fail(ErrorCode::CorruptFile, "matrix shape out of range");
  }
  Matrix m(rows, cols);
  double* p = m.data();
  for (Eigen::Index i = 0; i < m.size(); ++i) p[i] = read_f32(in);
  return m;
}

void read_matrix_into(std::istream& in, Matrix& m) {
  Matrix got = read_matrix(in);
  if (got.rows() != m.rows() || got.cols() != m.cols()) {
    fail(ErrorCode::CorruptFile, "tensor shape " + std::to_string(got.rows()) + "x" +
                                     std::to_string(got.cols()) + " does not match expected " +
                                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  m = std::move(got);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open for reading: " + path);
  return in;
}

}  // namespace numcomp::io
