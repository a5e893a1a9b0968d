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
#include <span>

#include "numcomp/linalg.hpp"

namespace numcomp {

struct MagnitudeConfig {
  int dim = 64;
  double min = -1e6;
  double max = 1e6;
  std::uint64_t seed = 0;
  /// Maps values through sign(x)·log(1+|x|) before the angle map.
  bool log_map = false;
};

/// Embeds a real number on a half circle: theta grows linearly from 0 at
/// `min` to pi at `max`, and (cos theta, sin theta) is rotated into `dim`
/// dimensions by a seeded orthonormal d x 2 basis. Values outside the range
/// are clamped. Rows have unit norm.
class MagnitudeEmbedder {
 public:
  explicit MagnitudeEmbedder(MagnitudeConfig config = {});

  const MagnitudeConfig& config() const { return config_; }
  int dim() const { return config_.dim; }
  const Matrix& basis() const { return basis_; }

  double angle(double x) const;
  RowVector embed(double x) const;
  /// One row per value; a non-finite value is reported with its row index.
  Matrix batch(std::span<const double> xs) const;

  void save(std::ostream& out) const;
  static MagnitudeEmbedder load(std::istream& in);

 private:
  MagnitudeConfig config_;
  Matrix basis_;
  double lo_;
  double hi_;
};

}  // namespace numcomp
