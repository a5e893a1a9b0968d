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

#include "numcomp/composite.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include "numcomp/error.hpp"
#include "numcomp/io.hpp"
#include "numcomp/text.hpp"

namespace numcomp {
namespace {

constexpr std::string_view kMagic = "NUMCAE01";

TokenSequence numeral_sequence(double x) {
  TokenSequence seq;
  seq.pieces = {Piece{std::string(kClsToken), false, 0.0, false},
                Piece{format_number(x), true, x, false},
                Piece{std::string(kSepToken), false, 0.0, false}};
  seq.ids = {kClsId, kNumId, kSepId};
  seq.numeral_positions = {1};
  seq.numeral_values = {x};
  return seq;
}

}  // namespace

std::string_view to_string(Slot slot) {
  switch (slot) {
    case Slot::Attribute: return "attribute";
    case Slot::Value1: return "value1";
    case Slot::Value2: return "value2";
    case Slot::Value3: return "value3";
    case Slot::Unit: return "unit";
  }
  return "attribute";
}

std::string_view to_string(Layout layout) {
  switch (layout) {
    case Layout::Scalar: return "scalar";
    case Layout::Range: return "range";
    case Layout::Gaussian: return "gaussian";
    case Layout::Text: return "text";
  }
  return "text";
}

Layout layout_of(const ParsedCell& cell) {
  switch (cell.tag()) {
    case KindTag::Scalar: return Layout::Scalar;
    case KindTag::Range: return Layout::Range;
    case KindTag::Gaussian: return Layout::Gaussian;
    case KindTag::Text: return Layout::Text;
  }
  return Layout::Text;
}

RowVector SlotBlock::mask_vector() const {
  RowVector m(kSlotCount * dim);
  for (int s = 0; s < kSlotCount; ++s) {
    m.segment(s * dim, dim).setConstant(mask[static_cast<std::size_t>(s)] ? 1.0 : 0.0);
  }
  return m;
}

std::string SlotBlock::mask_string() const {
  std::string out;
  for (bool bit : mask) out.push_back(bit ? '1' : '0');
  return out;
}

SlotBlock assemble(std::span<const Component> components, int dim, Layout layout) {
  SlotBlock block;
  block.dim = dim;
  block.layout = layout;
  block.values = RowVector::Zero(kSlotCount * dim);
  for (const Component& c : components) {
    const auto s = static_cast<std::size_t>(c.slot);
    if (block.mask[s]) {
      fail(ErrorCode::DuplicateSlot, "slot " + std::string(to_string(c.slot)) + " given twice");
    }
    if (c.vector.size() != dim) {
      fail(ErrorCode::ShapeMismatch, "component for slot " + std::string(to_string(c.slot)) +
                                         " has width " + std::to_string(c.vector.size()));
    }
    block.mask[s] = true;
    block.values.segment(static_cast<int>(s) * dim, dim) = c.vector;
  }
  return block;
}

ComponentEncoder::ComponentEncoder(const NumeralModel& model) : model_(model) {}

std::optional<RowVector> ComponentEncoder::attribute(std::string_view attribute) const {
  const std::string key(trim(attribute));
  {
    std::lock_guard lock(mutex_);
    if (auto it = attributes_.find(key); it != attributes_.end()) return it->second;
  }
  std::optional<RowVector> result;
  if (!key.empty()) {
    const std::string text = std::string(kClsToken) + " " + key + " " + std::string(kSepToken);
    const TokenSequence seq = model_.encoder.tokenize(text);
    const Matrix eo = model_.contextualize(seq);
    result = eo.middleRows(1, eo.rows() - 2).colwise().mean();
  }
  std::lock_guard lock(mutex_);
  return attributes_.emplace(key, std::move(result)).first->second;
}

RowVector ComponentEncoder::value(double x) const {
  {
    std::lock_guard lock(mutex_);
    if (auto it = values_.find(x); it != values_.end()) return it->second;
  }
  RowVector row = model_.forward(numeral_sequence(x), {}).row(0);
  std::lock_guard lock(mutex_);
  return values_.emplace(x, std::move(row)).first->second;
}

std::optional<RowVector> ComponentEncoder::unit(std::string_view canonical) const {
  const auto words = split_whitespace(canonical);
  if (words.empty()) return std::nullopt;
  RowVector sum = RowVector::Zero(dim());
  for (const auto& w : words) {
    sum += model_.encoder.token_embeddings.value.row(model_.encoder.vocab().id(w));
  }
  return sum / static_cast<double>(words.size());
}

std::vector<Component> ComponentEncoder::components(const ParsedCell& cell) const {
  std::vector<Component> out;
  if (auto a = attribute(cell.attribute)) out.push_back({Slot::Attribute, *a});
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Scalar>) {
          out.push_back({Slot::Value1, value(k.x)});
        } else if constexpr (std::is_same_v<K, Range>) {
          out.push_back({Slot::Value1, value(0.5 * (k.lo + k.hi))});
          out.push_back({Slot::Value2, value(std::fabs(k.hi - k.lo))});
        } else if constexpr (std::is_same_v<K, Gaussian>) {
          out.push_back({Slot::Value1, value(k.mean - k.sd)});
          out.push_back({Slot::Value2, value(k.mean)});
          out.push_back({Slot::Value3, value(k.mean + k.sd)});
        } else {
          fail(ErrorCode::TextCellUnsupported, "text cell has no value components");
        }
      },
      cell.kind);
  if (cell.unit) {
    if (auto u = unit(*cell.unit)) out.push_back({Slot::Unit, *u});
  }
  return out;
}

SlotBlock ComponentEncoder::block(const ParsedCell& cell) const {
  if (cell.tag() != KindTag::Text) return assemble(components(cell), dim(), layout_of(cell));
  std::vector<Component> out;
  if (auto a = attribute(cell.attribute)) out.push_back({Slot::Attribute, *a});
  if (cell.unit) {
    if (auto u = unit(*cell.unit)) out.push_back({Slot::Unit, *u});
  }
  return assemble(out, dim(), Layout::Text);
}

Autoencoder::Autoencoder(AutoencoderConfig config) {
  if (config.input_dim < 1 || config.code_dim < 1) {
    fail(ErrorCode::InvalidArgument, "autoencoder dims must be positive");
  }
  Rng rng = substream(config.seed, "autoencoder-init");
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(config.input_dim));
  w.resize(config.code_dim, config.input_dim);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = normal(rng);
  gain = RowVector::Ones(config.code_dim);
  bias = RowVector::Zero(config.code_dim);
}

void Autoencoder::check(const SlotBlock& block) const {
  if (block.values.size() != input_dim()) {
    fail(ErrorCode::ShapeMismatch, "slot block has width " + std::to_string(block.values.size()) +
                                       "; autoencoder expects " + std::to_string(input_dim()));
  }
}

RowVector Autoencoder::code(const SlotBlock& block) const {
  check(block);
  return (w * block.values.transpose()).transpose();
}

RowVector Autoencoder::project(const SlotBlock& block) const {
  const RowVector z = code(block);
  const double mean = z.mean();
  const double var = (z.array() - mean).square().mean();
  return ((z.array() - mean) / std::sqrt(var + eps)).matrix().cwiseProduct(gain) + bias;
}

double Autoencoder::loss(const SlotBlock& block, Matrix* grad) const {
  check(block);
  const Vector e = block.values.transpose();
  const Vector m = block.mask_vector().transpose();
  const Vector z = w * e;
  const Vector r = m.cwiseProduct(w.transpose() * z - e);
  if (grad) {
    const Vector two_r = 2.0 * r;
    grad->noalias() += z * two_r.transpose();
    grad->noalias() += (w * two_r) * e.transpose();
  }
  return r.squaredNorm();
}

void Autoencoder::save(std::ostream& out) const {
  io::write_magic(out, kMagic);
  io::write_u32(out, static_cast<std::uint32_t>(input_dim()));
  io::write_u32(out, static_cast<std::uint32_t>(code_dim()));
  io::write_f64(out, eps);
  io::write_matrix(out, w);
  io::write_matrix(out, Matrix(gain));
  io::write_matrix(out, Matrix(bias));
}

Autoencoder Autoencoder::load(std::istream& in) {
  io::expect_magic(in, kMagic);
  AutoencoderConfig c;
  c.input_dim = static_cast<int>(io::read_u32(in));
  c.code_dim = static_cast<int>(io::read_u32(in));
  if (c.input_dim < 1 || c.code_dim < 1 || c.input_dim > (1 << 20) || c.code_dim > (1 << 16)) {
    fail(ErrorCode::CorruptFile, "invalid autoencoder header");
  }
  Autoencoder ae(c);
  ae.eps = io::read_f64(in);
  io::read_matrix_into(in, ae.w);
  Matrix g(1, c.code_dim), b(1, c.code_dim);
  io::read_matrix_into(in, g);
  io::read_matrix_into(in, b);
  ae.gain = g.row(0);
  ae.bias = b.row(0);
  if (!ae.w.allFinite()) fail(ErrorCode::CorruptFile, "autoencoder holds non-finite weights");
  return ae;
}

void Autoencoder::save(const std::string& path) const {
  auto out = io::open_out(path);
  save(out);
  if (!out) fail(ErrorCode::Io, "failed writing " + path);
}

Autoencoder Autoencoder::load(const std::string& path) {
  auto in = io::open_in(path);
  return load(in);
}

std::vector<double> train_autoencoder(Autoencoder& ae, const std::vector<SlotBlock>& blocks,
                                      const AutoencoderTrainConfig& config) {
  if (blocks.empty()) fail(ErrorCode::EmptyCorpus, "no slot blocks to train on");
  if (config.steps < 1 || config.batch < 1) {
    fail(ErrorCode::InvalidArgument, "steps and batch size must be positive");
  }
  nn::Param w(ae.w.rows(), ae.w.cols());
  w.value = ae.w;
  nn::Adam adam(nn::AdamOptions{config.lr, 0.9, 0.999, 1e-8});
  Rng rng = substream(config.seed, "autoencoder-training");
  std::uniform_int_distribution<std::size_t> pick(0, blocks.size() - 1);
  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(config.steps));
  const int batch = std::min<int>(config.batch, static_cast<int>(blocks.size()));
  for (int step = 1; step <= config.steps; ++step) {
    w.zero_grad();
    double total = 0.0;
    for (int b = 0; b < batch; ++b) total += ae.loss(blocks[pick(rng)], &w.grad);
    total /= batch;
    w.grad /= batch;
    if (!std::isfinite(total) || !w.grad.allFinite()) {
      fail(ErrorCode::DivergenceDetected,
           "reconstruction loss became non-finite at step " + std::to_string(step));
    }
    trace.push_back(total);
    adam.step({&w});
    ae.w = w.value;
  }
  return trace;
}

}  // namespace numcomp

namespace numcomp {

CompositeEmbedder::CompositeEmbedder(const ComponentEncoder& components, const Autoencoder& ae,
                                     Ablation ablation)
    : components_(components), ae_(ae), ablation_(ablation) {
  if (ae.input_dim() != kSlotCount * components.dim()) {
    fail(ErrorCode::ShapeMismatch, "autoencoder input width does not match the slot layout");
  }
}

SlotBlock CompositeEmbedder::block(const ParsedCell& cell) const {
  SlotBlock b = components_.block(cell);
  if (ablation_ == Ablation::AttributeOnly) {
    for (int s = 1; s < kSlotCount; ++s) {
      b.mask[static_cast<std::size_t>(s)] = false;
      b.values.segment(s * b.dim, b.dim).setZero();
    }
  }
  return b;
}

RowVector CompositeEmbedder::embed(const ParsedCell& cell) const {
  return ae_.project(block(cell));
}

}  // namespace numcomp
