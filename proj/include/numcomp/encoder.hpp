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
#include <string_view>
#include <vector>

#include "numcomp/nn.hpp"
#include "numcomp/vocab.hpp"

namespace numcomp {

struct EncoderConfig {
  int dim = 64;
  int heads = 4;
  int layers = 2;
  int max_length = static_cast<int>(kDefaultMaxLength);
  double init_std = 0.02;
  std::uint64_t seed = 0;
};

/// Token + learned position embeddings followed by a stack of post-norm
/// transformer layers. Every numeral enters as the shared [NUM] id.
class Encoder {
 public:
  struct Cache {
    std::vector<int> ids;
    std::vector<nn::TransformerLayer::Cache> layers;
  };

  Encoder(EncoderConfig config, Vocabulary vocab);

  const EncoderConfig& config() const { return config_; }
  const Vocabulary& vocab() const { return vocab_; }
  int dim() const { return config_.dim; }

  TokenSequence tokenize(std::string_view serialized) const;

  /// Encoder output for a sequence of ids (l x d).
  Matrix encode(const std::vector<int>& ids, Cache* cache = nullptr) const;
  Matrix encode(const TokenSequence& seq) const { return encode(seq.ids); }

  /// Accumulates parameter gradients given dLoss/d(output).
  void backward(const Cache& cache, const Matrix& d_out);

  std::vector<nn::Param*> params();

  /// Header (dims, layer count, vocab size, seed) + vocab table + tensors.
  void save(std::ostream& out);
  static Encoder load(std::istream& in);

  nn::Param token_embeddings;
  nn::Param position_embeddings;
  std::vector<nn::TransformerLayer> layers;

 private:
  EncoderConfig config_;
  Vocabulary vocab_;
};

}  // namespace numcomp
