// Copyright 2026 The offmask Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "offmask/error.hpp"

namespace offmask {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UsageError: return "UsageError";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::MissingEmojiMap: return "MissingEmojiMap";
    case ErrorCode::EmptyDocument: return "EmptyDocument";
    case ErrorCode::EmptyAfterPreprocess: return "EmptyAfterPreprocess";
    case ErrorCode::DuplicateToken: return "DuplicateToken";
    case ErrorCode::MissingSpecialToken: return "MissingSpecialToken";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MissingClass: return "MissingClass";
    case ErrorCode::MalformedScoreFile: return "MalformedScoreFile";
    case ErrorCode::MalformedModelFile: return "MalformedModelFile";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::EmptyLexicon: return "EmptyLexicon";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooFewPerClass: return "TooFewPerClass";
    case ErrorCode::CountMismatch: return "CountMismatch";
  }
  return "Unknown";
}

ErrorFamily family_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UsageError:
    case ErrorCode::InvalidGrid:
      return ErrorFamily::Usage;
    case ErrorCode::IoFailure:
      return ErrorFamily::Io;
    default:
      return ErrorFamily::Data;
  }
}

}  // namespace offmask
