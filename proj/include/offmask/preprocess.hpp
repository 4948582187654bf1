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

#ifndef OFFMASK_PREPROCESS_HPP_
#define OFFMASK_PREPROCESS_HPP_

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "offmask/corpus.hpp"

namespace offmask {

enum class LanguageMode { EnglishLike, PersianLike };

std::string_view to_string(LanguageMode mode) noexcept;

/// Emoji codepoint sequence -> English descriptor.
///
/// File format: one entry per line, `HEX[ HEX...]<TAB>descriptor`, where the
/// key is the codepoint sequence in hex (spaces, '-' or '_' between
/// codepoints). Blank lines and lines starting with '#' are ignored.
class EmojiMap {
 public:
  static EmojiMap load(const std::filesystem::path& path);
  static EmojiMap parse(std::string_view contents, std::string_view source = "<memory>");

  void add(std::u32string sequence, std::string descriptor);

  /// Longest entry that is a prefix of `text`; returns its length, or 0.
  std::size_t match(std::u32string_view text, std::string* descriptor) const;
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::map<std::u32string, std::string, std::less<>> entries_;
  std::size_t longest_ = 0;
};

struct PreprocessPolicy {
  LanguageMode language_mode = LanguageMode::EnglishLike;
  /// Applied later by the tokenizer; recorded here so one config drives both.
  int max_tokens = 64;
  /// EnglishLike only: replace emoji with descriptors rather than drop them.
  bool replace_emoji = true;
  std::optional<std::filesystem::path> emoji_map_path;
  std::shared_ptr<const EmojiMap> emoji_map;
  std::string user_token = "@USER";
  std::string collapsed_user_token = "@USERS";

  /// EnglishLike policy; loads the map when a path is given.
  static PreprocessPolicy english(std::optional<std::filesystem::path> emoji_map_path);
  static PreprocessPolicy english(std::shared_ptr<const EmojiMap> map);
  static PreprocessPolicy persian();

  /// Throws UsageError for max_tokens < 1.
  void validate() const;
};

std::string segment_hashtags(std::string_view text);
std::string normalize_elongation(std::string_view text);
std::string apply_user_url_policy(std::string_view text, const PreprocessPolicy& policy);
/// Throws MissingEmojiMap for EnglishLike with replacement on and no map.
std::string handle_emoji(std::string_view text, const PreprocessPolicy& policy);
std::string normalize_persian_chars(std::string_view text);

/// Runs the full pipeline in a fixed order: emoji, hashtags, user/URL
/// policy, elongation, Persian character normalization (PersianLike only),
/// whitespace collapse. Throws EmptyAfterPreprocess if nothing is left.
RawDocument preprocess_document(const RawDocument& doc, const PreprocessPolicy& policy);

struct PreprocessBatch {
  std::vector<RawDocument> kept;
  std::vector<std::string> rejected_ids;
};

/// Order-preserving batch driver; empty-after-cleaning documents are
/// reported rather than thrown.
PreprocessBatch preprocess_corpus(std::span<const RawDocument> docs, const PreprocessPolicy& policy);

}  // namespace offmask

#endif  // OFFMASK_PREPROCESS_HPP_
