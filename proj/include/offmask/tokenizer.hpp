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

#ifndef OFFMASK_TOKENIZER_HPP_
#define OFFMASK_TOKENIZER_HPP_

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace offmask {

using TokenId = std::int32_t;

/// Immutable token <-> id table; line index in the vocab file is the id.
class Vocabulary {
 public:
  static constexpr std::string_view kPad = "[PAD]";
  static constexpr std::string_view kUnk = "[UNK]";
  static constexpr std::string_view kCls = "[CLS]";
  static constexpr std::string_view kSep = "[SEP]";

  /// Throws DuplicateToken or MissingSpecialToken.
  explicit Vocabulary(std::vector<std::string> tokens);

  static Vocabulary load(const std::filesystem::path& path);
  static Vocabulary parse(std::string_view contents);

  std::size_t size() const noexcept { return tokens_.size(); }
  /// Entries that are not one of the four special tokens.
  std::size_t regular_size() const noexcept { return tokens_.size() - 4; }

  std::optional<TokenId> find(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token).has_value(); }
  const std::string& token(TokenId id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  TokenId pad_id() const noexcept { return pad_; }
  TokenId unk_id() const noexcept { return unk_; }
  TokenId cls_id() const noexcept { return cls_; }
  TokenId sep_id() const noexcept { return sep_; }
  bool is_special(TokenId id) const noexcept {
    return id == pad_ || id == unk_ || id == cls_ || id == sep_;
  }
  static bool is_special_token(std::string_view token) noexcept {
    return token == kPad || token == kUnk || token == kCls || token == kSep;
  }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId, Hash, std::equal_to<>> index_;
  TokenId pad_ = 0, unk_ = 0, cls_ = 0, sep_ = 0;
};

/// Fixed-length encoded document: [CLS] pieces... [SEP] [PAD]...
struct TokenSequence {
  std::vector<TokenId> ids;
  std::vector<std::string> tokens;
  std::size_t n_real = 0;

  std::size_t size() const noexcept { return ids.size(); }
  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

struct EncodeOptions {
  std::size_t max_tokens = 64;
  /// ASCII lowercasing; on for EnglishLike text.
  bool lowercase = true;
};

/// Whitespace split, then every punctuation character becomes its own word.
std::vector<std::string> basic_tokenize(std::string_view text, bool lowercase);

/// Greedy longest-match-first WordPiece. A word with an uncoverable position,
/// or needing more than `max_pieces` pieces, becomes a single [UNK].
std::vector<std::string> wordpiece_tokenize(
    std::string_view word, const Vocabulary& vocab,
    std::size_t max_pieces = std::numeric_limits<std::size_t>::max());

/// Throws EmptyInput if no piece survives; max_tokens must be >= 2.
TokenSequence encode(std::string_view text, const Vocabulary& vocab, const EncodeOptions& options);

/// Token strings of the non-special span (between [CLS] and [SEP]).
std::vector<std::string> decode(const TokenSequence& seq);

}  // namespace offmask

#endif  // OFFMASK_TOKENIZER_HPP_
