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

#include "numcomp/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <random>

#include "numcomp/error.hpp"
#include "numcomp/io.hpp"
#include "numcomp/text.hpp"

namespace numcomp {
namespace {

constexpr std::string_view kMagic = "NUMCFUS1";

void check_positions(std::span<const std::size_t> positions, Eigen::Index rows) {
  for (std::size_t p : positions) {
    if (static_cast<Eigen::Index>(p) >= rows) {
      fail(ErrorCode::IndexOutOfBounds, "numeral position " + std::to_string(p) +
                                            " outside a sequence of length " +
                                            std::to_string(rows));
    }
  }
}

}  // namespace

double magnitude_target(double y) { return 1.0 + std::fabs(y); }

int numeral_class(double y) {
  const int bucket = static_cast<int>(
      std::clamp(std::floor(std::log10(magnitude_target(y))), 0.0,
                 static_cast<double>(kMagnitudeBuckets - 1)));
  return bucket + (y < 0.0 ? kMagnitudeBuckets : 0);
}

Matrix gather_numerals(const Matrix& ee, std::span<const std::size_t> positions) {
  check_positions(positions, ee.rows());
  Matrix me(static_cast<Eigen::Index>(positions.size()), ee.cols());
  for (std::size_t j = 0; j < positions.size(); ++j) {
    me.row(static_cast<Eigen::Index>(j)) = ee.row(static_cast<Eigen::Index>(positions[j]));
  }
  return me;
}

Matrix fuse(const Matrix& me, const Matrix& mn) {
  if (me.rows() != mn.rows() || me.cols() != mn.cols()) {
    fail(ErrorCode::ShapeMismatch, "fusion inputs differ in shape");
  }
  return me + mn;
}

Matrix scatter_numerals(const Matrix& ee, std::span<const std::size_t> positions,
                        const Matrix& mo) {
  if (mo.rows() != static_cast<Eigen::Index>(positions.size()) || mo.cols() != ee.cols()) {
    fail(ErrorCode::ShapeMismatch, "refined numeral matrix does not match the positions");
  }
  check_positions(positions, ee.rows());
  Matrix eo = ee;
  for (std::size_t j = 0; j < positions.size(); ++j) {
    eo.row(static_cast<Eigen::Index>(positions[j])) = mo.row(static_cast<Eigen::Index>(j));
  }
  return eo;
}

NumeralLoss numeral_loss_log(const Vector& log_y_hat, const Matrix& logits,
                             std::span<const double> y, std::span<const int> classes,
                             Vector* d_log_y_hat, Matrix* d_logits) {
  const auto s = static_cast<Eigen::Index>(y.size());
  if (log_y_hat.size() != s || logits.rows() != s ||
      classes.size() != y.size()) {
    fail(ErrorCode::ShapeMismatch, "numeral loss inputs differ in length");
  }
  NumeralLoss out;
  if (d_log_y_hat) d_log_y_hat->resize(s);
  if (d_logits) d_logits->resize(s, logits.cols());
  for (Eigen::Index i = 0; i < s; ++i) {
    const double target = y[static_cast<std::size_t>(i)];
    if (!(target > 0.0)) fail(ErrorCode::NonPositiveMagnitude, "magnitude target must be positive");
    const int c = classes[static_cast<std::size_t>(i)];
    if (c < 0 || c >= logits.cols()) fail(ErrorCode::IndexOutOfBounds, "class label out of range");
    const double diff = std::log(target) - log_y_hat(i);
    out.magnitude += diff * diff;
    const double mx = logits.row(i).maxCoeff();
    const RowVector e = (logits.row(i).array() - mx).exp();
    const double z = e.sum();
    out.classification += mx + std::log(z) - logits(i, c);
    if (d_log_y_hat) (*d_log_y_hat)(i) = -2.0 * diff;
    if (d_logits) {
      d_logits->row(i) = e / z;
      (*d_logits)(i, c) -= 1.0;
    }
  }
  out.total = out.magnitude + out.classification;
  return out;
}

NumeralLoss numeral_loss(std::span<const double> y_hat, const Matrix& logits,
                         std::span<const double> y, std::span<const int> classes) {
  Vector log_y_hat(static_cast<Eigen::Index>(y_hat.size()));
  for (std::size_t i = 0; i < y_hat.size(); ++i) {
    if (!(y_hat[i] > 0.0)) {
      fail(ErrorCode::NonPositiveMagnitude, "predicted magnitude must be positive");
    }
    log_y_hat(static_cast<Eigen::Index>(i)) = std::log(y_hat[i]);
  }
  return numeral_loss_log(log_y_hat, logits, y, classes);
}

NumeralModel::NumeralModel(Encoder encoder_, MagnitudeEmbedder magnitude_, FusionConfig config)
    : encoder(std::move(encoder_)),
      magnitude(std::move(magnitude_)),
      block(encoder.dim(), encoder.config().heads),
      magnitude_head(encoder.dim(), 1),
      class_head(encoder.dim(), kNumeralClasses),
      config_(config) {
  if (magnitude.dim() != encoder.dim()) {
    fail(ErrorCode::ShapeMismatch, "magnitude embedder dim differs from the encoder dim");
  }
  Rng rng = substream(encoder.config().seed, "fusion-init");
  block.init(rng, encoder.config().init_std);
  magnitude_head.init(rng, encoder.config().init_std);
  class_head.init(rng, encoder.config().init_std);
}

double NumeralModel::magnitude_scale() const {
  return config_.magnitude_scale > 0.0 ? config_.magnitude_scale
                                       : std::sqrt(static_cast<double>(dim()));
}

Matrix NumeralModel::magnitude_rows(std::span<const double> values,
                                    const std::vector<char>& masked) const {
  Matrix mn = Matrix::Zero(static_cast<Eigen::Index>(values.size()), dim());
  if (!config_.use_magnitude) return mn;
  const double scale = magnitude_scale();
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (j < masked.size() && masked[j]) continue;
    mn.row(static_cast<Eigen::Index>(j)) = scale * magnitude.embed(values[j]);
  }
  return mn;
}

Matrix NumeralModel::forward(const TokenSequence& seq, const std::vector<char>& masked,
                             Pass* pass) const {
  if (seq.ids.size() != seq.pieces.size()) {
    fail(ErrorCode::ShapeMismatch, "sequence has no token ids; tokenize it first");
  }
  std::vector<int> ids = seq.ids;
  for (std::size_t j = 0; j < seq.numeral_positions.size(); ++j) {
    if (j < masked.size() && masked[j]) ids[seq.numeral_positions[j]] = kMaskId;
  }
  Matrix ee = encoder.encode(ids, pass ? &pass->encoder : nullptr);
  const Matrix me = gather_numerals(ee, seq.numeral_positions);
  Matrix mo = me.rows() == 0
                  ? Matrix(0, dim())
                  : block.forward(fuse(me, magnitude_rows(seq.numeral_values, masked)),
                                  pass ? &pass->block : nullptr);
  if (pass) {
    pass->ee = std::move(ee);
    pass->mo = mo;
  }
  return mo;
}

Matrix NumeralModel::contextualize(const TokenSequence& seq) const {
  Pass pass;
  forward(seq, {}, &pass);
  return scatter_numerals(pass.ee, seq.numeral_positions, pass.mo);
}

NumeralLoss NumeralModel::loss(const TokenSequence& seq, const std::vector<char>& masked,
                               double weight, bool accumulate, bool train_encoder) {
  if (!has_heads_) fail(ErrorCode::InvalidArgument, "model was exported without prediction heads");
  std::vector<Eigen::Index> rows;
  for (std::size_t j = 0; j < seq.numeral_positions.size(); ++j) {
    if (j < masked.size() && masked[j]) rows.push_back(static_cast<Eigen::Index>(j));
  }
  if (rows.empty()) return {};
  Pass pass;
  const Matrix mo = forward(seq, masked, &pass);
  Matrix picked(static_cast<Eigen::Index>(rows.size()), dim());
  std::vector<double> targets;
  std::vector<int> classes;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    picked.row(static_cast<Eigen::Index>(k)) = mo.row(rows[k]);
    const double y = seq.numeral_values[static_cast<std::size_t>(rows[k])];
    targets.push_back(magnitude_target(y));
    classes.push_back(numeral_class(y));
  }
  const Matrix log_pred = magnitude_head.forward(picked);
  const Matrix logits = class_head.forward(picked);
  Vector d_log;
  Matrix d_logits;
  NumeralLoss l = numeral_loss_log(log_pred.col(0), logits, targets, classes,
                                   accumulate ? &d_log : nullptr,
                                   accumulate ? &d_logits : nullptr);
  l.total *= weight;
  l.magnitude *= weight;
  l.classification *= weight;
  if (!accumulate) return l;

  Matrix d_picked = magnitude_head.backward(picked, weight * Matrix(d_log));
  d_picked += class_head.backward(picked, weight * d_logits);
  Matrix d_mo = Matrix::Zero(mo.rows(), mo.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    d_mo.row(rows[k]) = d_picked.row(static_cast<Eigen::Index>(k));
  }
  const Matrix d_mf = block.backward(pass.block, d_mo);
  if (train_encoder) {
    Matrix d_ee = Matrix::Zero(pass.ee.rows(), pass.ee.cols());
    for (std::size_t j = 0; j < seq.numeral_positions.size(); ++j) {
      d_ee.row(static_cast<Eigen::Index>(seq.numeral_positions[j])) +=
          d_mf.row(static_cast<Eigen::Index>(j));
    }
    encoder.backward(pass.encoder, d_ee);
  }
  return l;
}

std::vector<nn::Param*> NumeralModel::fusion_params() {
  std::vector<nn::Param*> out;
  block.collect(out);
  return out;
}

std::vector<nn::Param*> NumeralModel::head_params() {
  std::vector<nn::Param*> out;
  magnitude_head.collect(out);
  class_head.collect(out);
  return out;
}

void NumeralModel::strip_heads() { has_heads_ = false; }

void NumeralModel::save(std::ostream& out) {
  encoder.save(out);
  io::write_magic(out, kMagic);
  io::write_u32(out, config_.use_magnitude ? 1u : 0u);
  io::write_f64(out, config_.magnitude_scale);
  magnitude.save(out);
  nn::save_params(out, fusion_params());
  io::write_u32(out, has_heads_ ? 1u : 0u);
  if (has_heads_) nn::save_params(out, head_params());
}

NumeralModel NumeralModel::load(std::istream& in) {
  Encoder enc = Encoder::load(in);
  io::expect_magic(in, kMagic);
  FusionConfig config;
  config.use_magnitude = io::read_u32(in) != 0;
  config.magnitude_scale = io::read_f64(in);
  MagnitudeEmbedder mag = MagnitudeEmbedder::load(in);
  NumeralModel model(std::move(enc), std::move(mag), config);
  nn::load_params(in, model.fusion_params());
  model.has_heads_ = io::read_u32(in) != 0;
  if (model.has_heads_) nn::load_params(in, model.head_params());
  return model;
}

void NumeralModel::save(const std::string& path) {
  auto out = io::open_out(path);
  save(out);
  if (!out) fail(ErrorCode::Io, "failed writing " + path);
}

NumeralModel NumeralModel::load(const std::string& path) {
  auto in = io::open_in(path);
  return load(in);
}

std::vector<TraceRow> train_numeral_model(NumeralModel& model,
                                          const std::vector<TokenSequence>& corpus,
                                          const TrainConfig& config) {
  if (!(config.mask_ratio > 0.0 && config.mask_ratio < 1.0)) {
    fail(ErrorCode::InvalidArgument, "masking ratio must lie in (0, 1)");
  }
  if (config.steps < 1 || config.batch < 1) {
    fail(ErrorCode::InvalidArgument, "steps and batch size must be positive");
  }
  std::vector<const TokenSequence*> pool;
  for (const auto& seq : corpus) {
    if (!seq.numeral_positions.empty()) pool.push_back(&seq);
  }
  if (pool.empty()) fail(ErrorCode::EmptyCorpus, "no training sequence contains a numeral");
  if (config.center_magnitude_head) {
    model.magnitude_head.b.value.setConstant(mean_log_magnitude(corpus));
  }

  std::vector<nn::Param*> params = model.fusion_params();
  for (nn::Param* p : model.head_params()) params.push_back(p);
  if (!config.freeze_encoder) {
    for (nn::Param* p : model.encoder.params()) params.push_back(p);
  }
  nn::Adam adam(config.adam);
  Rng rng = substream(config.seed, "numeral-training");
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::bernoulli_distribution coin(config.mask_ratio);

  std::vector<TraceRow> trace;
  trace.reserve(static_cast<std::size_t>(config.steps));
  for (int step = 1; step <= config.steps; ++step) {
    std::vector<const TokenSequence*> batch;
    std::vector<std::vector<char>> masks;
    int masked = 0;
    for (int b = 0; b < config.batch; ++b) {
      const TokenSequence* seq = pool[pick(rng)];
      std::vector<char> mask(seq->numeral_positions.size());
      for (char& m : mask) {
        m = coin(rng) ? 1 : 0;
        masked += m;
      }
      batch.push_back(seq);
      masks.push_back(std::move(mask));
    }
    TraceRow row;
    row.step = step;
    row.masked = masked;
    if (masked > 0) {
      nn::zero_grads(params);
      const double weight = 1.0 / masked;
      for (std::size_t b = 0; b < batch.size(); ++b) {
        const NumeralLoss l =
            model.loss(*batch[b], masks[b], weight, true, !config.freeze_encoder);
        row.loss += l.total;
        row.magnitude += l.magnitude;
        row.classification += l.classification;
      }
      if (!std::isfinite(row.loss) || !nn::grads_finite(params)) {
        fail(ErrorCode::DivergenceDetected,
             "numeral loss became non-finite at step " + std::to_string(step));
      }
      adam.step(params);
    }
    trace.push_back(row);
  }
  return trace;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "step,loss,mag_loss,cls_loss\n";
  for (const auto& r : trace) {
    out << r.step << ',' << format_number(r.loss) << ',' << format_number(r.magnitude) << ','
        << format_number(r.classification) << '\n';
  }
}

MagnitudeEval evaluate_magnitude(const NumeralModel& model,
                                 const std::vector<TokenSequence>& sequences,
                                 double baseline_log) {
  if (!model.has_heads()) {
    fail(ErrorCode::InvalidArgument, "model was exported without prediction heads");
  }
  MagnitudeEval out;
  double err = 0.0;
  double base = 0.0;
  for (const auto& seq : sequences) {
    for (std::size_t j = 0; j < seq.numeral_positions.size(); ++j) {
      std::vector<char> mask(seq.numeral_positions.size(), 0);
      mask[j] = 1;
      const Matrix mo = model.forward(seq, mask);
      const double pred = model.magnitude_head.forward(mo.row(static_cast<Eigen::Index>(j)))(0, 0);
      const double truth = std::log(magnitude_target(seq.numeral_values[j]));
      err += (truth - pred) * (truth - pred);
      base += (truth - baseline_log) * (truth - baseline_log);
      ++out.count;
    }
  }
  if (out.count == 0) fail(ErrorCode::EmptyCorpus, "no held-out numerals to evaluate");
  out.log_rmse = std::sqrt(err / out.count);
  out.baseline_log_rmse = std::sqrt(base / out.count);
  return out;
}

double mean_log_magnitude(const std::vector<TokenSequence>& sequences) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& seq : sequences) {
    for (double v : seq.numeral_values) {
      sum += std::log(magnitude_target(v));
      ++n;
    }
  }
  if (n == 0) fail(ErrorCode::EmptyCorpus, "no numerals in corpus");
  return sum / static_cast<double>(n);
}

}  // namespace numcomp
