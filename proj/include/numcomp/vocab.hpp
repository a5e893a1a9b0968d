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

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "numcomp/serialize.hpp"

namespace numcomp {

/// Whole-word vocabulary. Ids 0..3 are the specials, the next `buckets` ids
/// are hash buckets for out-of-vocabulary words, and corpus words follow.
/// Words are matched case-insensitively.
class Vocabulary {
 public:
  static constexpr int kDefaultBuckets = 256;

  explicit Vocabulary(int buckets = kDefaultBuckets);

  /// Registers a word (no-op if known) and returns its id.
  int add(std::string_view word);
  /// Registers every non-numeral, non-special piece of a sequence.
  void add_words(const TokenSequence& seq);

  std::optional<int> find(std::string_view word) const;
  /// Known id, or the hash bucket for an unknown word.
  int id(std::string_view word) const;
  std::string label(int id) const;

  int size() const { return kSpecialCount + buckets_ + static_cast<int>(words_.size()); }
  int buckets() const { return buckets_; }
  const std::vector<std::string>& words() const { return words_; }

  /// Fills `seq.ids`: specials keep their fixed ids, numerals map to [NUM].
  void assign_ids(TokenSequence& seq) const;

 private:
  int buckets_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
};

/// Lexes rendered serialization text and assigns ids.
TokenSequence tokenize(std::string_view text, const Vocabulary& vocab,
                       std::size_t max_length = kDefaultMaxLength);

}  // namespace numcomp
