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

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "numcomp/cell.hpp"

namespace numcomp {

inline constexpr std::string_view kClsToken = "[CLS]";
inline constexpr std::string_view kSepToken = "[SEP]";
inline constexpr std::string_view kMaskToken = "[MASK]";
inline constexpr std::string_view kNumToken = "[NUM]";

inline constexpr int kClsId = 0;
inline constexpr int kSepId = 1;
inline constexpr int kMaskId = 2;
inline constexpr int kNumId = 3;
inline constexpr int kSpecialCount = 4;

inline constexpr std::size_t kDefaultMaxLength = 128;

/// A serialized column or row. `pieces` keep the surface text (rendering
/// joins them with single spaces unless glued); `ids` are filled in by a
/// Vocabulary. Every numeral occupies exactly one position.
struct TokenSequence {
  std::vector<Piece> pieces;
  std::vector<int> ids;
  std::vector<std::size_t> numeral_positions;
  std::vector<double> numeral_values;

  std::size_t size() const { return pieces.size(); }
  std::string text() const;
};

/// `[CLS] a_j [SEP] v_1 [SEP] ... v_n [SEP]`. Throws SequenceTooLong.
TokenSequence serialize_column(std::string_view header, std::span<const std::string> cells,
                               std::size_t max_length = kDefaultMaxLength);

/// `[CLS] a_1 v_1 [SEP] ... a_m v_m [SEP]`. Throws LengthMismatch or
/// SequenceTooLong.
TokenSequence serialize_row(std::span<const std::string> headers,
                            std::span<const std::string> cells,
                            std::size_t max_length = kDefaultMaxLength);

/// Re-lexes rendered text ("[CLS] Age [SEP] 28 [SEP]") into pieces and
/// numeral positions, recognizing the special tokens.
TokenSequence lex_serialized(std::string_view text, std::size_t max_length = kDefaultMaxLength);

}  // namespace numcomp
