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

#include "numcomp/index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>

#include "numcomp/error.hpp"
#include "numcomp/io.hpp"

namespace numcomp {
namespace {

constexpr std::string_view kMagic = "CONEVEC1";

AggregateEmbedding aggregate(std::span<const RowVector> cells, AggregateKind kind,
                             std::string source) {
  if (cells.empty()) fail(ErrorCode::EmptyColumn, "cannot aggregate zero cells");
  AggregateEmbedding out;
  out.kind = kind;
  out.source = std::move(source);
  out.count = cells.size();
  out.vector = RowVector::Zero(cells.front().size());
  for (const RowVector& c : cells) {
    if (c.size() != out.vector.size()) {
      fail(ErrorCode::DimMismatch, "cell embeddings differ in dimension");
    }
    out.vector += c;
  }
  return out;
}

bool ranks_before(const Hit& a, const Hit& b) {
  return a.score != b.score ? a.score > b.score : a.id < b.id;
}

void write_file(const std::string& path, int dim, const std::vector<std::string>& ids,
                const float* rows) {
  auto out = io::open_out(path);
  io::write_magic(out, kMagic);
  io::write_u32(out, static_cast<std::uint32_t>(dim));
  io::write_u64(out, ids.size());
  for (std::size_t i = 0; i < ids.size() * static_cast<std::size_t>(dim); ++i) {
    io::write_f32(out, rows[i]);
  }
  for (const auto& id : ids) io::write_string(out, id);
  if (!out) fail(ErrorCode::Io, "failed writing " + path);
}

void read_file(const std::string& path, int& dim, std::vector<std::string>& ids,
               std::vector<float>& rows) {
  auto in = io::open_in(path);
  io::expect_magic(in, kMagic);
  dim = static_cast<int>(io::read_u32(in));
  const std::uint64_t count = io::read_u64(in);
  if (dim < 1 || dim > (1 << 20) || count > (1ull << 32) ||
      count * static_cast<std::uint64_t>(dim) > (1ull << 32)) {
    fail(ErrorCode::CorruptFile, "vector file header out of range");
  }
  rows.resize(count * static_cast<std::size_t>(dim));
  for (float& f : rows) f = io::read_f32(in);
  ids.clear();
  ids.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) ids.push_back(io::read_string(in));
  if (in.peek() != std::char_traits<char>::eof()) {
    fail(ErrorCode::CorruptFile, "trailing bytes after vector file");
  }
}

}  // namespace

std::string_view to_string(AggregateKind kind) {
  return kind == AggregateKind::Column ? "column" : "tuple";
}

AggregateEmbedding column_embedding(std::span<const RowVector> cells, std::string source) {
  return aggregate(cells, AggregateKind::Column, std::move(source));
}

AggregateEmbedding tuple_embedding(std::span<const RowVector> cells, std::string source) {
  return aggregate(cells, AggregateKind::Tuple, std::move(source));
}

double cosine(const RowVector& u, const RowVector& v) {
  if (u.size() != v.size()) fail(ErrorCode::DimMismatch, "cosine of vectors of different sizes");
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) fail(ErrorCode::ZeroVector, "cosine of a zero vector");
  return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

FlatIndex::FlatIndex(int dim) : dim_(dim), mutex_(std::make_unique<std::shared_mutex>()) {
  if (dim < 1) fail(ErrorCode::InvalidArgument, "index dimension must be positive");
}

FlatIndex::FlatIndex(FlatIndex&& other) noexcept
    : dim_(other.dim_),
      data_(std::move(other.data_)),
      ids_(std::move(other.ids_)),
      id_set_(std::move(other.id_set_)),
      mutex_(std::make_unique<std::shared_mutex>()) {}

FlatIndex& FlatIndex::operator=(FlatIndex&& other) noexcept {
  dim_ = other.dim_;
  data_ = std::move(other.data_);
  ids_ = std::move(other.ids_);
  id_set_ = std::move(other.id_set_);
  return *this;
}

std::size_t FlatIndex::size() const {
  std::shared_lock lock(*mutex_);
  return ids_.size();
}

std::vector<std::string> FlatIndex::ids() const {
  std::shared_lock lock(*mutex_);
  return ids_;
}

RowVector FlatIndex::vector(std::size_t row) const {
  std::shared_lock lock(*mutex_);
  if (row >= ids_.size()) fail(ErrorCode::IndexOutOfBounds, "index row out of range");
  RowVector v(dim_);
  for (int j = 0; j < dim_; ++j) v(j) = data_[row * static_cast<std::size_t>(dim_) + j];
  return v;
}

void FlatIndex::add(std::string id, const RowVector& v) {
  if (v.size() != dim_) {
    fail(ErrorCode::DimMismatch, "vector of dimension " + std::to_string(v.size()) +
                                     " added to an index of dimension " + std::to_string(dim_));
  }
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    fail(ErrorCode::ZeroVector, "cannot index a zero or non-finite vector: " + id);
  }
  std::unique_lock lock(*mutex_);
  if (id_set_.count(id)) fail(ErrorCode::DuplicateId, "duplicate id: " + id);
  for (int j = 0; j < dim_; ++j) data_.push_back(static_cast<float>(v(j) / norm));
  id_set_.insert(id);
  ids_.push_back(std::move(id));
}

RankedResult FlatIndex::query(const RowVector& v, int k, std::string_view exclude) const {
  if (k < 1) fail(ErrorCode::InvalidArgument, "k must be at least 1");
  if (v.size() != dim_) fail(ErrorCode::DimMismatch, "query dimension differs from the index");
  const double norm = v.norm();
  if (!(norm > 0.0)) fail(ErrorCode::ZeroVector, "query vector is zero");
  const RowVector q = v / norm;
  std::shared_lock lock(*mutex_);
  if (ids_.empty()) fail(ErrorCode::EmptyIndex, "index is empty");
  std::vector<Hit> hits;
  hits.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!exclude.empty() && ids_[i] == exclude) continue;
    const float* row = &data_[i * static_cast<std::size_t>(dim_)];
    double s = 0.0;
    for (int j = 0; j < dim_; ++j) s += static_cast<double>(row[j]) * q(j);
    hits.push_back({ids_[i], s});
  }
  const std::size_t top = std::min(hits.size(), static_cast<std::size_t>(k));
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(top), hits.end(),
                    ranks_before);
  hits.resize(top);
  return hits;
}

void FlatIndex::save(const std::string& path) const {
  std::shared_lock lock(*mutex_);
  write_file(path, dim_, ids_, data_.data());
}

FlatIndex FlatIndex::load(const std::string& path) {
  int dim = 0;
  std::vector<std::string> ids;
  std::vector<float> rows;
  read_file(path, dim, ids, rows);
  FlatIndex idx(dim);
  for (const auto& id : ids) {
    if (!idx.id_set_.insert(id).second) fail(ErrorCode::CorruptFile, "duplicate id in file: " + id);
  }
  idx.ids_ = std::move(ids);
  idx.data_ = std::move(rows);
  return idx;
}

void write_vectors(const std::string& path, const VectorSet& set) {
  if (set.vectors.rows() != static_cast<Eigen::Index>(set.ids.size()) ||
      (set.vectors.rows() > 0 && set.vectors.cols() != set.dim)) {
    fail(ErrorCode::ShapeMismatch, "vector set ids and rows disagree");
  }
  std::vector<float> rows(static_cast<std::size_t>(set.vectors.size()));
  for (Eigen::Index i = 0; i < set.vectors.size(); ++i) {
    rows[static_cast<std::size_t>(i)] = static_cast<float>(set.vectors.data()[i]);
  }
  write_file(path, set.dim, set.ids, rows.data());
}

VectorSet read_vectors(const std::string& path) {
  VectorSet set;
  std::vector<float> rows;
  read_file(path, set.dim, set.ids, rows);
  set.vectors.resize(static_cast<Eigen::Index>(set.ids.size()), set.dim);
  for (std::size_t i = 0; i < rows.size(); ++i) set.vectors.data()[i] = rows[i];
  return set;
}

}  // namespace numcomp
