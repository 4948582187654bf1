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

#ifndef OFFMASK_ERROR_HPP_
#define OFFMASK_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace offmask {

/// Every failure the library reports. The CLI maps each code onto an
/// exit-status family (usage, io, data).
enum class ErrorCode {
  // usage
  UsageError,
  InvalidGrid,
  // io
  IoFailure,
  // data
  MissingEmojiMap,
  EmptyDocument,
  EmptyAfterPreprocess,
  DuplicateToken,
  MissingSpecialToken,
  EmptyInput,
  MissingClass,
  MalformedScoreFile,
  MalformedModelFile,
  MalformedInput,
  ShapeMismatch,
  UnknownLabel,
  EmptyLexicon,
  LengthMismatch,
  TooFewPerClass,
  CountMismatch,
};

enum class ErrorFamily { Usage, Io, Data };

std::string_view to_string(ErrorCode code) noexcept;
ErrorFamily family_of(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorFamily family() const noexcept { return family_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace offmask

#endif  // OFFMASK_ERROR_HPP_
