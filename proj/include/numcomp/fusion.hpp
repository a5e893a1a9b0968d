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
#include <vector>

#include "numcomp/encoder.hpp"
#include "numcomp/magnitude.hpp"

namespace numcomp {

inline constexpr int kMagnitudeBuckets = 8;
/// Magnitude buckets, doubled by a sign bit.
inline constexpr int kNumeralClasses = 2 * kMagnitudeBuckets;

/// 1 + |y|: the positive quantity whose log the magnitude head regresses.
double magnitude_target(double y);
/// clamp(floor(log10(1 + |y|)), 0, 7) + 8 for negative values.
int numeral_class(double y);

/// Row j is encoder output row positions[j]. Throws IndexOutOfBounds.
Matrix gather_numerals(const Matrix& ee, std::span<const std::size_t> positions);
/// Elementwise sum. Throws ShapeMismatch.
Matrix fuse(const Matrix& me, const Matrix& mn);
/// Copy of the encoder output with the numeral rows replaced by the refined
/// rows. Throws ShapeMismatch or IndexOutOfBounds.
Matrix scatter_numerals(const Matrix& ee, std::span<const std::size_t> positions,
                        const Matrix& mo);

struct NumeralLoss {
  double total = 0.0;
  double magnitude = 0.0;
  double classification = 0.0;
};

/// Sum over numerals of (log y - log y_hat)^2 + cross-entropy(c, logits).
/// `y` and `y_hat` must be positive (apply magnitude_target first).
NumeralLoss numeral_loss(std::span<const double> y_hat, const Matrix& logits,
                         std::span<const double> y, std::span<const int> classes);

/// Same loss with the magnitude prediction given as log y_hat; optionally
/// returns gradients with respect to both inputs.
NumeralLoss numeral_loss_log(const Vector& log_y_hat, const Matrix& logits,
                             std::span<const double> y, std::span<const int> classes,
                             Vector* d_log_y_hat = nullptr, Matrix* d_logits = nullptr);

struct FusionConfig {
  /// When false the magnitude rows are always zero (the no-magnitude ablation).
  bool use_magnitude = true;
  /// Multiplier on the unit-norm magnitude rows; 0 selects sqrt(d), the
  /// typical row norm of a normalized hidden state.
  double magnitude_scale = 0.0;
};

/// Encoder plus the numeral fusion block and the two prediction heads.
class NumeralModel {
 public:
  struct Pass {
    Encoder::Cache encoder;
    nn::TransformerLayer::Cache block;
    Matrix ee;
    Matrix mo;
  };

  NumeralModel(Encoder encoder, MagnitudeEmbedder magnitude, FusionConfig config = {});

  int dim() const { return encoder.dim(); }
  const FusionConfig& config() const { return config_; }
  double magnitude_scale() const;

  /// Scaled magnitude rows, zero for masked numerals.
  Matrix magnitude_rows(std::span<const double> values, const std::vector<char>& masked) const;

  /// Runs the encoder with masked numerals replaced by [MASK], fuses, and
  /// refines. Returns the refined numeral rows (s x d).
  Matrix forward(const TokenSequence& seq, const std::vector<char>& masked,
                 Pass* pass = nullptr) const;

  /// Fused output rows for an unmasked sequence.
  Matrix contextualize(const TokenSequence& seq) const;

  /// Loss over the masked numerals of one sequence, scaled by `weight`.
  /// When `accumulate` is set, gradients are added to the parameters
  /// (encoder gradients only if `train_encoder`).
  NumeralLoss loss(const TokenSequence& seq, const std::vector<char>& masked, double weight,
                   bool accumulate, bool train_encoder = true);

  std::vector<nn::Param*> fusion_params();
  std::vector<nn::Param*> head_params();
  bool has_heads() const { return has_heads_; }
  /// Discards the prediction heads (inference export).
  void strip_heads();

  void save(std::ostream& out);
  static NumeralModel load(std::istream& in);
  void save(const std::string& path);
  static NumeralModel load(const std::string& path);

  Encoder encoder;
  MagnitudeEmbedder magnitude;
  nn::TransformerLayer block;
  nn::Linear magnitude_head;
  nn::Linear class_head;

 private:
  FusionConfig config_;
  bool has_heads_ = true;
};

struct TrainConfig {
  double mask_ratio = 0.3;
  int steps = 500;
  int batch = 8;
  std::uint64_t seed = 0;
  nn::AdamOptions adam;
  bool freeze_encoder = false;
  /// Start the magnitude head's bias at the corpus mean log target.
  bool center_magnitude_head = true;
};

struct TraceRow {
  int step = 0;
  double loss = 0.0;
  double magnitude = 0.0;
  double classification = 0.0;
  int masked = 0;
};

/// Masked numeral prediction. Each step samples `batch` sequences, masks
/// each numeral with probability `mask_ratio`, and takes one Adam step on
/// the mean loss per masked numeral. A step with nothing masked records a
/// zero loss and leaves the weights unchanged.
std::vector<TraceRow> train_numeral_model(NumeralModel& model,
                                          const std::vector<TokenSequence>& corpus,
                                          const TrainConfig& config);

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);

struct MagnitudeEval {
  double log_rmse = 0.0;
  double baseline_log_rmse = 0.0;
  int count = 0;
};

/// Masks each numeral of each sequence in turn and compares the predicted
/// log magnitude with the truth; the baseline always predicts `baseline_log`.
MagnitudeEval evaluate_magnitude(const NumeralModel& model,
                                 const std::vector<TokenSequence>& sequences,
                                 double baseline_log);

/// Mean of log(1 + |y|) over all numerals of a corpus.
double mean_log_magnitude(const std::vector<TokenSequence>& sequences);

}  // namespace numcomp
