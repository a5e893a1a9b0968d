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

#include "numcomp/encoder.hpp"

#include <istream>
#include <ostream>

#include "numcomp/error.hpp"
#include "numcomp/io.hpp"

namespace numcomp {
namespace {

constexpr std::string_view kMagic = "NUMCENC1";

void validate(const EncoderConfig& c) {
  if (c.dim < 1 || c.heads < 1 || c.layers < 0 || c.max_length < 2) {
    fail(ErrorCode::InvalidArgument, "encoder dims must be positive");
  }
  if (c.dim % c.heads != 0) {
    fail(ErrorCode::InvalidArgument, "encoder dim must be divisible by the head count");
  }
}

}  // namespace

Encoder::Encoder(EncoderConfig config, Vocabulary vocab)
    : config_(config), vocab_(std::move(vocab)) {
  validate(config_);
  Rng rng = substream(config_.seed, "encoder-init");
  token_embeddings = nn::Param(vocab_.size(), config_.dim);
  position_embeddings = nn::Param(config_.max_length, config_.dim);
  nn::init_normal(token_embeddings, rng, config_.init_std);
  nn::init_normal(position_embeddings, rng, config_.init_std);
  for (int i = 0; i < config_.layers; ++i) {
    layers.emplace_back(config_.dim, config_.heads);
    layers.back().init(rng, config_.init_std);
  }
}

TokenSequence Encoder::tokenize(std::string_view serialized) const {
  return numcomp::tokenize(serialized, vocab_, static_cast<std::size_t>(config_.max_length));
}

Matrix Encoder::encode(const std::vector<int>& ids, Cache* cache) const {
  const auto l = static_cast<Eigen::Index>(ids.size());
  if (l > config_.max_length) {
    fail(ErrorCode::SequenceTooLong, "sequence of " + std::to_string(l) +
                                         " tokens exceeds the encoder limit of " +
                                         std::to_string(config_.max_length));
  }
  Matrix h(l, config_.dim);
  for (Eigen::Index i = 0; i < l; ++i) {
    const int id = ids[static_cast<std::size_t>(i)];
    if (id < 0 || id >= token_embeddings.value.rows()) {
      fail(ErrorCode::IndexOutOfBounds, "token id " + std::to_string(id) + " out of range");
    }
    h.row(i) = token_embeddings.value.row(id) + position_embeddings.value.row(i);
  }
  if (cache) {
    cache->ids = ids;
    cache->layers.assign(layers.size(), {});
  }
  for (std::size_t k = 0; k < layers.size(); ++k) {
    h = layers[k].forward(h, cache ? &cache->layers[k] : nullptr);
  }
  return h;
}

void Encoder::backward(const Cache& cache, const Matrix& d_out) {
  Matrix d = d_out;
  for (std::size_t k = layers.size(); k-- > 0;) d = layers[k].backward(cache.layers[k], d);
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    token_embeddings.grad.row(cache.ids[static_cast<std::size_t>(i)]) += d.row(i);
    position_embeddings.grad.row(i) += d.row(i);
  }
}

std::vector<nn::Param*> Encoder::params() {
  std::vector<nn::Param*> out{&token_embeddings, &position_embeddings};
  for (auto& layer : layers) layer.collect(out);
  return out;
}

void Encoder::save(std::ostream& out) {
  io::write_magic(out, kMagic);
  io::write_u32(out, static_cast<std::uint32_t>(config_.dim));
  io::write_u32(out, static_cast<std::uint32_t>(config_.heads));
  io::write_u32(out, static_cast<std::uint32_t>(config_.layers));
  io::write_u32(out, static_cast<std::uint32_t>(config_.max_length));
  io::write_u32(out, static_cast<std::uint32_t>(vocab_.size()));
  io::write_u32(out, static_cast<std::uint32_t>(vocab_.buckets()));
  io::write_u64(out, config_.seed);
  io::write_f64(out, config_.init_std);
  io::write_u32(out, static_cast<std::uint32_t>(vocab_.words().size()));
  for (const auto& w : vocab_.words()) io::write_string(out, w);
  nn::save_params(out, params());
}

Encoder Encoder::load(std::istream& in) {
  io::expect_magic(in, kMagic);
  EncoderConfig c;
  c.dim = static_cast<int>(io::read_u32(in));
  c.heads = static_cast<int>(io::read_u32(in));
  c.layers = static_cast<int>(io::read_u32(in));
  c.max_length = static_cast<int>(io::read_u32(in));
  const std::uint32_t vocab_size = io::read_u32(in);
  const int buckets = static_cast<int>(io::read_u32(in));
  c.seed = io::read_u64(in);
  c.init_std = io::read_f64(in);
  if (c.dim < 1 || c.dim > 4096 || c.heads < 1 || c.layers > 64 || c.max_length > 65536 ||
      buckets < 1 || c.dim % c.heads != 0) {
    fail(ErrorCode::CorruptFile, "invalid encoder header");
  }
  Vocabulary vocab(buckets);
  const std::uint32_t words = io::read_u32(in);
  for (std::uint32_t i = 0; i < words; ++i) vocab.add(io::read_string(in));
  if (static_cast<std::uint32_t>(vocab.size()) != vocab_size) {
    fail(ErrorCode::CorruptFile, "vocabulary size does not match header");
  }
  Encoder enc(c, std::move(vocab));
  nn::load_params(in, enc.params());
  return enc;
}

}  // namespace numcomp
