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

#include "numcomp/vocab.hpp"

#include "numcomp/error.hpp"
#include "numcomp/rng.hpp"
#include "numcomp/text.hpp"

namespace numcomp {
namespace {

std::optional<int> special_id(std::string_view text) {
  if (text == kClsToken) return kClsId;
  if (text == kSepToken) return kSepId;
  if (text == kMaskToken) return kMaskId;
  if (text == kNumToken) return kNumId;
  return std::nullopt;
}

}  // namespace

Vocabulary::Vocabulary(int buckets) : buckets_(buckets) {
  if (buckets < 1) fail(ErrorCode::InvalidArgument, "vocabulary needs at least one hash bucket");
}

int Vocabulary::add(std::string_view word) {
  if (auto sid = special_id(word)) return *sid;
  std::string key = to_lower(word);
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  const int next = size();
  index_.emplace(key, next);
  words_.push_back(std::move(key));
  return next;
}

void Vocabulary::add_words(const TokenSequence& seq) {
  for (const Piece& piece : seq.pieces) {
    if (!piece.numeral) add(piece.text);
  }
}

std::optional<int> Vocabulary::find(std::string_view word) const {
  if (auto sid = special_id(word)) return sid;
  if (auto it = index_.find(to_lower(word)); it != index_.end()) return it->second;
  return std::nullopt;
}

int Vocabulary::id(std::string_view word) const {
  if (auto known = find(word)) return *known;
  return kSpecialCount + static_cast<int>(fnv1a(to_lower(word)) % static_cast<unsigned>(buckets_));
}

std::string Vocabulary::label(int id) const {
  static constexpr std::string_view kSpecials[] = {kClsToken, kSepToken, kMaskToken, kNumToken};
  if (id < 0 || id >= size()) fail(ErrorCode::IndexOutOfBounds, "token id out of range");
  if (id < kSpecialCount) return std::string(kSpecials[id]);
  if (id < kSpecialCount + buckets_) return "[B" + std::to_string(id - kSpecialCount) + "]";
  return words_[static_cast<std::size_t>(id - kSpecialCount - buckets_)];
}

void Vocabulary::assign_ids(TokenSequence& seq) const {
  seq.ids.clear();
  seq.ids.reserve(seq.pieces.size());
  for (const Piece& piece : seq.pieces) {
    seq.ids.push_back(piece.numeral ? kNumId : id(piece.text));
  }
}

TokenSequence tokenize(std::string_view text, const Vocabulary& vocab, std::size_t max_length) {
  TokenSequence seq = lex_serialized(text, max_length);
  vocab.assign_ids(seq);
  return seq;
}

}  // namespace numcomp
