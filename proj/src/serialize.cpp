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

#include "numcomp/serialize.hpp"

#include "numcomp/error.hpp"

namespace numcomp {
namespace {

class Builder {
 public:
  explicit Builder(std::size_t max_length) : max_length_(max_length) {}

  void special(std::string_view token) {
    seq_.pieces.push_back(Piece{std::string(token), false, 0.0, false});
  }

  void text(std::string_view text) {
    for (Piece& piece : lex_text(text)) {
      if (piece.numeral) {
        seq_.numeral_positions.push_back(seq_.pieces.size());
        seq_.numeral_values.push_back(piece.value);
      }
      seq_.pieces.push_back(std::move(piece));
    }
  }

  TokenSequence finish() {
    if (seq_.pieces.size() > max_length_) {
      fail(ErrorCode::SequenceTooLong,
           "serialized sequence has " + std::to_string(seq_.pieces.size()) +
               " tokens; maximum is " + std::to_string(max_length_));
    }
    return std::move(seq_);
  }

 private:
  std::size_t max_length_;
  TokenSequence seq_;
};

}  // namespace

std::string TokenSequence::text() const {
  std::string out;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (i > 0 && !pieces[i].glued) out.push_back(' ');
    out += pieces[i].text;
  }
  return out;
}

TokenSequence serialize_column(std::string_view header, std::span<const std::string> cells,
                               std::size_t max_length) {
  Builder b(max_length);
  b.special(kClsToken);
  b.text(header);
  b.special(kSepToken);
  for (const std::string& cell : cells) {
    b.text(cell);
    b.special(kSepToken);
  }
  return b.finish();
}

TokenSequence serialize_row(std::span<const std::string> headers,
                            std::span<const std::string> cells, std::size_t max_length) {
  if (headers.size() != cells.size()) {
    fail(ErrorCode::LengthMismatch, "row has " + std::to_string(cells.size()) +
                                        " cells but " + std::to_string(headers.size()) +
                                        " headers");
  }
  Builder b(max_length);
  b.special(kClsToken);
  for (std::size_t j = 0; j < headers.size(); ++j) {
    b.text(headers[j]);
    b.text(cells[j]);
    b.special(kSepToken);
  }
  return b.finish();
}

TokenSequence lex_serialized(std::string_view text, std::size_t max_length) {
  Builder b(max_length);
  std::string pending;
  auto flush = [&] {
    if (!pending.empty()) b.text(pending);
    pending.clear();
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    bool matched = false;
    for (std::string_view special : {kClsToken, kSepToken, kMaskToken, kNumToken}) {
      if (text.substr(pos, special.size()) == special) {
        flush();
        b.special(special);
        pos += special.size();
        matched = true;
        break;
      }
    }
    if (!matched) pending.push_back(text[pos++]);
  }
  flush();
  return b.finish();
}

}  // namespace numcomp
