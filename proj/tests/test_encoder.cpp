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

#include <sstream>

#include "doctest.h"
#include "numcomp/csv.hpp"
#include "numcomp/encoder.hpp"
#include "numcomp/error.hpp"
#include "numcomp/pipeline.hpp"
#include "support/oracles.hpp"

using namespace numcomp;

namespace {

Encoder small_encoder(double init_std = 0.02, std::uint64_t seed = 11) {
  Vocabulary vocab(16);
  for (const char* w : {"age", "sex", "bp", "weight"}) vocab.add(w);
  EncoderConfig c;
  c.dim = 8;
  c.heads = 2;
  c.layers = 2;
  c.max_length = 16;
  c.init_std = init_std;
  c.seed = seed;
  return Encoder(c, std::move(vocab));
}

}  // namespace

TEST_CASE("encode shape and determinism") {
  const Encoder enc = small_encoder();
  const TokenSequence seq = enc.tokenize("[CLS] Age [SEP] 28 [SEP] 34 [SEP]");
  const Matrix a = enc.encode(seq);
  CHECK(a.rows() == static_cast<Eigen::Index>(seq.size()));
  CHECK(a.cols() == 8);
  CHECK((a - enc.encode(seq)).norm() == 0.0);
  CHECK(a.allFinite());
}

TEST_CASE("numerals occupy a single position") {
  const Encoder enc = small_encoder();
  const TokenSequence a = enc.tokenize("[CLS] Age [SEP] 28 [SEP]");
  const TokenSequence b = enc.tokenize("[CLS] Age [SEP] 2812345.75 [SEP]");
  CHECK(a.ids == b.ids);
  CHECK(a.numeral_positions == std::vector<std::size_t>{3});
}

TEST_CASE("position embeddings make order matter") {
  const Encoder enc = small_encoder(0.5);
  const TokenSequence seq = enc.tokenize("[CLS] age sex bp [SEP]");
  std::vector<int> swapped = seq.ids;
  std::swap(swapped[1], swapped[2]);
  const Matrix a = enc.encode(seq.ids);
  const Matrix b = enc.encode(swapped);
  CHECK((a.row(1) - b.row(2)).norm() > 1e-6);
}

TEST_CASE("encoder length and id checks") {
  const Encoder enc = small_encoder();
  CHECK_THROWS_AS(enc.encode(std::vector<int>(17, kSepId)), Error);
  CHECK_THROWS_AS(enc.encode(std::vector<int>{kClsId, 100000}), Error);
  CHECK_THROWS_AS(enc.tokenize("[CLS] a b c d e f g h i j k l m n o p q [SEP]"), Error);
}

TEST_CASE("gradient check: full encoder on a three-token sequence") {
  Encoder enc = small_encoder(0.3);
  const std::vector<int> ids{kClsId, *enc.vocab().find("age"), kSepId};
  Rng rng(12);
  std::normal_distribution<double> n;
  Matrix r(3, 8);
  for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = n(rng);
  auto params = enc.params();
  nn::zero_grads(params);
  Encoder::Cache cache;
  enc.encode(ids, &cache);
  enc.backward(cache, r);
  const auto report = oracle::check_params(
      params, [&] { return (enc.encode(ids).array() * r.array()).sum(); }, 13, 24);
  CHECK(report.max_rel < 1e-3);
}

TEST_CASE("encoder checkpoint round trip") {
  Encoder enc = small_encoder(0.1, 21);
  std::stringstream io;
  enc.save(io);
  const Encoder back = Encoder::load(io);
  CHECK(back.vocab().size() == enc.vocab().size());
  CHECK(back.config().layers == 2);
  const TokenSequence seq = enc.tokenize("[CLS] weight [SEP] 70 [SEP]");
  CHECK((back.encode(seq) - enc.encode(seq)).norm() < 1e-5);
  std::string bytes = io.str();
  std::istringstream truncated(bytes.substr(0, bytes.size() / 2));
  CHECK_THROWS_AS(Encoder::load(truncated), Error);
}

TEST_CASE("forward pass over the cohort fixture stays finite") {
  const Table t = read_csv(std::string(NUMCOMP_FIXTURES) + "/surgery_cohort.csv");
  auto seqs = training_sequences({t}, 128);
  const Vocabulary vocab = build_vocabulary(seqs, 32);
  EncoderConfig c;
  c.seed = 5;
  const Encoder enc(c, vocab);
  for (auto& s : seqs) {
    vocab.assign_ids(s);
    CHECK(enc.encode(s).allFinite());
  }
}
