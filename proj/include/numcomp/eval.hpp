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
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "numcomp/cell.hpp"
#include "numcomp/composite.hpp"
#include "numcomp/linalg.hpp"

namespace numcomp {

/// Any map from a number to a vector (value slot, random baseline, ...).
using ValueEmbedding = std::function<RowVector(double)>;
/// Any map from a numeric payload to a vector.
using KindEmbedding = std::function<RowVector(const NumericKind&)>;

/// A fixed Gaussian vector per distinct value, seeded by the value's bits.
ValueEmbedding random_value_embedding(int dim, std::uint64_t seed);

/// Concatenated value-slot embeddings of a payload (scalar: x; range:
/// center, length; gaussian: mean-sd, mean, mean+sd).
KindEmbedding value_slots(ValueEmbedding value);

/// Composite embedding of a payload with a fixed attribute and optional unit.
KindEmbedding composite_of(const CompositeEmbedder& embedder, std::string attribute,
                           std::optional<std::string> unit = std::nullopt);

enum class Distance { Cosine, Euclidean };

struct AuditConfig {
  int number_pairs = 1000;
  double number_max = 1000.0;
  int range_pairs = 1000;
  int gaussian_pairs = 500;
  std::uint64_t seed = 0;
};

struct CorrelationResult {
  std::string kind;    // number | range | gaussian
  std::string metric;  // d_num | d_CL | d_IoU | d_W2
  double pearson = 0.0;
  double spearman = 0.0;
  std::vector<double> analytic;
  std::vector<double> embedded;
};

/// Samples pairs of the given kind (numbers uniform on [0, number_max];
/// ranges with endpoints uniform on [0,100], [1,1000] or [0,10000] in turn;
/// gaussians with mean ~ U(0,100), sd ~ U(1,10)) and correlates each
/// analytic distance with the embedding distance.
std::vector<CorrelationResult> correlation_audit(KindTag kind, const AuditConfig& config,
                                                 const KindEmbedding& embed,
                                                 Distance distance = Distance::Cosine);

void write_audit_csv(std::ostream& out, const std::vector<CorrelationResult>& results);

enum class ProbeTask { ListMax, Decode, Add };
std::string_view to_string(ProbeTask task);

struct ProbeConfig {
  ProbeTask task = ProbeTask::ListMax;
  int max_value = 100;  // integers in [0, max_value]
  int train_samples = 1000;
  int test_samples = 200;
  int steps = 2000;
  int batch = 128;
  double lr = 1e-3;
  int seeds = 3;
  std::uint64_t seed = 0;
};

struct ProbeResult {
  ProbeTask task = ProbeTask::ListMax;
  std::string metric;  // accuracy | rmse
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> per_seed;
};

/// Splits the integers 80/20 into disjoint train/test pools, builds the
/// task datasets from each pool, trains the probe perceptron on the frozen
/// (standardized) embeddings and reports the test metric averaged over seeds.
/// Throws RangeTooSmall when a pool cannot supply distinct samples.
ProbeResult run_probe(const ProbeConfig& config, const ValueEmbedding& embed);

enum class RotatedPart { Attribute, Value, Unit };
std::string_view to_string(RotatedPart part);

struct Rotation {
  RotatedPart part;
  std::string text;  // new attribute or unit
  double value = 0.0;
};

struct RotationRow {
  std::string label;
  double similarity = 0.0;
  double drop = 0.0;
};

/// Replaces one component of a scalar reference cell at a time and reports
/// the cosine similarity of each rotated composite to the reference. The
/// first row is the reference itself.
std::vector<RotationRow> rotation_ablation(const CompositeEmbedder& embedder,
                                           const ParsedCell& reference,
                                           const std::vector<Rotation>& rotations);

}  // namespace numcomp
