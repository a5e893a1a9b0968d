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

#include "numcomp/error.hpp"

namespace numcomp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SequenceTooLong: return "SequenceTooLong";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::IndexOutOfBounds: return "IndexOutOfBounds";
    case ErrorCode::NonPositiveMagnitude: return "NonPositiveMagnitude";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::DivergenceDetected: return "DivergenceDetected";
    case ErrorCode::TextCellUnsupported: return "TextCellUnsupported";
    case ErrorCode::DuplicateSlot: return "DuplicateSlot";
    case ErrorCode::EmptyColumn: return "EmptyColumn";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::EmptyIndex: return "EmptyIndex";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::ConstantSeries: return "ConstantSeries";
    case ErrorCode::NoQueries: return "NoQueries";
    case ErrorCode::UnknownQueryId: return "UnknownQueryId";
    case ErrorCode::RangeTooSmall: return "RangeTooSmall";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace numcomp
