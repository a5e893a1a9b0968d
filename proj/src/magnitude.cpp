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

#include "numcomp/magnitude.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "numcomp/error.hpp"
#include "numcomp/io.hpp"
#include "numcomp/rng.hpp"

namespace numcomp {
namespace {

constexpr std::string_view kMagic = "NUMCMAG1";

double warp(double x, bool log_map) {
  return log_map ? std::copysign(std::log1p(std::fabs(x)), x) : x;
}

Matrix orthonormal_basis(int dim, std::uint64_t seed) {
  Rng rng = substream(seed, "magnitude-basis");
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix b(dim, 2);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < 2; ++j) b(i, j) = normal(rng);
  }
  // Gram-Schmidt on two columns.
  b.col(0).normalize();
  b.col(1) -= b.col(0).dot(b.col(1)) * b.col(0);
  b.col(1).normalize();
  return b;
}

}  // namespace

MagnitudeEmbedder::MagnitudeEmbedder(MagnitudeConfig config) : config_(config) {
  if (config_.dim < 2) fail(ErrorCode::InvalidArgument, "magnitude embedding needs dim >= 2");
  if (!std::isfinite(config_.min) || !std::isfinite(config_.max) ||
      !(config_.min < config_.max)) {
    fail(ErrorCode::InvalidArgument, "magnitude range must satisfy min < max");
  }
  basis_ = orthonormal_basis(config_.dim, config_.seed);
  lo_ = warp(config_.min, config_.log_map);
  hi_ = warp(config_.max, config_.log_map);
}

double MagnitudeEmbedder::angle(double x) const {
  if (!std::isfinite(x)) fail(ErrorCode::NonFiniteInput, "cannot embed a non-finite value");
  const double t = std::clamp(warp(x, config_.log_map), lo_, hi_);
  return std::numbers::pi * (t - lo_) / (hi_ - lo_);
}

RowVector MagnitudeEmbedder::embed(double x) const {
  const double theta = angle(x);
  return (basis_.col(0) * std::cos(theta) + basis_.col(1) * std::sin(theta)).transpose();
}

Matrix MagnitudeEmbedder::batch(std::span<const double> xs) const {
  Matrix out(static_cast<Eigen::Index>(xs.size()), config_.dim);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i])) {
      fail(ErrorCode::NonFiniteInput, "non-finite value at row " + std::to_string(i));
    }
    out.row(static_cast<Eigen::Index>(i)) = embed(xs[i]);
  }
  return out;
}

void MagnitudeEmbedder::save(std::ostream& out) const {
  io::write_magic(out, kMagic);
  io::write_u32(out, static_cast<std::uint32_t>(config_.dim));
  io::write_f64(out, config_.min);
  io::write_f64(out, config_.max);
  io::write_u64(out, config_.seed);
  io::write_u32(out, config_.log_map ? 1u : 0u);
  io::write_matrix(out, basis_);
}

MagnitudeEmbedder MagnitudeEmbedder::load(std::istream& in) {
  io::expect_magic(in, kMagic);
  MagnitudeConfig config;
  config.dim = static_cast<int>(io::read_u32(in));
  config.min = io::read_f64(in);
  config.max = io::read_f64(in);
  config.seed = io::read_u64(in);
  config.log_map = io::read_u32(in) != 0;
  if (config.dim < 2 || config.dim > (1 << 16) || !(config.min < config.max)) {
    fail(ErrorCode::CorruptFile, "invalid magnitude embedder header");
  }
  // The basis is regenerated from the seed (exact) and checked against the
  // stored float32 copy.
  MagnitudeEmbedder e(config);
  const Matrix stored = io::read_matrix(in);
  if (stored.rows() != config.dim || stored.cols() != 2 ||
      (stored - e.basis_).cwiseAbs().maxCoeff() > 1e-6) {
    fail(ErrorCode::CorruptFile, "stored magnitude basis does not match its seed");
  }
  return e;
}

}  // namespace numcomp
