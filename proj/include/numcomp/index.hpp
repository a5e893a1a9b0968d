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

#include <memory>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "numcomp/linalg.hpp"

namespace numcomp {

enum class AggregateKind { Column, Tuple };
std::string_view to_string(AggregateKind kind);

struct AggregateEmbedding {
  RowVector vector;
  AggregateKind kind = AggregateKind::Column;
  std::string source;
  std::size_t count = 0;
};

/// Sum of the cell composites. Throws EmptyColumn or DimMismatch.
AggregateEmbedding column_embedding(std::span<const RowVector> cells, std::string source = {});
AggregateEmbedding tuple_embedding(std::span<const RowVector> cells, std::string source = {});

/// Throws ZeroVector or DimMismatch.
double cosine(const RowVector& u, const RowVector& v);

struct Hit {
  std::string id;
  double score = 0.0;
  bool operator==(const Hit&) const = default;
};
using RankedResult = std::vector<Hit>;

/// Exact inner-product search over L2-normalized float32 rows. Queries may
/// run concurrently; add() takes an exclusive lock.
class FlatIndex {
 public:
  explicit FlatIndex(int dim);
  FlatIndex(FlatIndex&& other) noexcept;
  FlatIndex& operator=(FlatIndex&& other) noexcept;

  int dim() const { return dim_; }
  std::size_t size() const;
  std::vector<std::string> ids() const;
  /// Stored (normalized) row as doubles.
  RowVector vector(std::size_t row) const;

  /// Normalizes and stores. Throws DimMismatch, DuplicateId, ZeroVector.
  void add(std::string id, const RowVector& v);

  /// Top-k by inner product with the normalized query, score descending,
  /// ties by ascending id. `exclude` drops one id (the query's own entry).
  /// Throws EmptyIndex, DimMismatch, ZeroVector, InvalidArgument (k < 1).
  RankedResult query(const RowVector& v, int k, std::string_view exclude = {}) const;

  /// Vector file: "CONEVEC1", u32 dim, u64 count, float32 rows, then ids as
  /// u32 length + UTF-8 bytes. Throws CorruptFile on load.
  void save(const std::string& path) const;
  static FlatIndex load(const std::string& path);

 private:
  int dim_;
  std::vector<float> data_;
  std::vector<std::string> ids_;
  std::unordered_set<std::string> id_set_;
  std::unique_ptr<std::shared_mutex> mutex_;
};

/// Raw (unnormalized) vectors with ids in the same file format.
struct VectorSet {
  int dim = 0;
  std::vector<std::string> ids;
  Matrix vectors;
};

void write_vectors(const std::string& path, const VectorSet& set);
VectorSet read_vectors(const std::string& path);

}  // namespace numcomp
