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

#include "offmask/preprocess.hpp"

#include <algorithm>

#include "offmask/error.hpp"
#include "offmask/io.hpp"
#include "offmask/unicode.hpp"

namespace offmask {

namespace u = unicode;

std::string_view to_string(LanguageMode mode) noexcept {
  return mode == LanguageMode::EnglishLike ? "en" : "fa";
}

// ---------------------------------------------------------------------------
// EmojiMap

EmojiMap EmojiMap::load(const std::filesystem::path& path) {
  return parse(io::read_file(path), path.string());
}

EmojiMap EmojiMap::parse(std::string_view contents, std::string_view source) {
  EmojiMap map;
  const auto lines = io::split_lines(contents);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const auto& line = lines[n];
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    const std::string where = std::string(source) + ":" + std::to_string(n + 1);
    if (tab == std::string::npos) {
      throw Error(ErrorCode::MalformedInput, where + ": expected HEX<TAB>descriptor");
    }
    std::u32string seq;
    std::string hex = line.substr(0, tab);
    std::replace_if(hex.begin(), hex.end(), [](char c) { return c == '-' || c == '_'; }, ' ');
    for (const auto& part : u::split_whitespace(u::decode(hex))) {
      const std::string piece = u::encode(part);
      std::size_t used = 0;
      unsigned long cp = 0;
      try {
        cp = std::stoul(piece, &used, 16);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != piece.size() || cp > 0x10FFFF) {
        throw Error(ErrorCode::MalformedInput, where + ": bad codepoint '" + piece + "'");
      }
      seq.push_back(static_cast<char32_t>(cp));
    }
    const std::string descriptor =
        u::encode(u::collapse_whitespace(u::decode(std::string_view(line).substr(tab + 1))));
    if (seq.empty() || descriptor.empty()) {
      throw Error(ErrorCode::MalformedInput, where + ": empty key or descriptor");
    }
    map.add(std::move(seq), descriptor);
  }
  return map;
}

void EmojiMap::add(std::u32string sequence, std::string descriptor) {
  longest_ = std::max(longest_, sequence.size());
  entries_[std::move(sequence)] = std::move(descriptor);
}

std::size_t EmojiMap::match(std::u32string_view text, std::string* descriptor) const {
  for (std::size_t len = std::min(longest_, text.size()); len > 0; --len) {
    const auto it = entries_.find(text.substr(0, len));
    if (it != entries_.end()) {
      if (descriptor) *descriptor = it->second;
      return len;
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Policy

PreprocessPolicy PreprocessPolicy::english(std::optional<std::filesystem::path> emoji_map_path) {
  PreprocessPolicy p;
  p.language_mode = LanguageMode::EnglishLike;
  p.emoji_map_path = emoji_map_path;
  if (emoji_map_path) p.emoji_map = std::make_shared<const EmojiMap>(EmojiMap::load(*emoji_map_path));
  return p;
}

PreprocessPolicy PreprocessPolicy::english(std::shared_ptr<const EmojiMap> map) {
  PreprocessPolicy p;
  p.language_mode = LanguageMode::EnglishLike;
  p.emoji_map = std::move(map);
  return p;
}

PreprocessPolicy PreprocessPolicy::persian() {
  PreprocessPolicy p;
  p.language_mode = LanguageMode::PersianLike;
  p.replace_emoji = false;
  return p;
}

void PreprocessPolicy::validate() const {
  if (max_tokens < 1) throw Error(ErrorCode::UsageError, "max_tokens must be >= 1");
}

// ---------------------------------------------------------------------------
// Single transforms

namespace {

bool is_hashtag_body(char32_t cp) {
  return cp == U'_' || !(u::is_whitespace(cp) || u::is_punctuation(cp));
}

// Splits a hashtag body on underscores, digit/non-digit boundaries and
// lower->upper transitions.
std::vector<std::u32string> split_hashtag_body(std::u32string_view body) {
  std::vector<std::u32string> words;
  std::u32string current;
  auto flush = [&] {
    if (!current.empty()) words.push_back(std::move(current));
    current.clear();
  };
  for (char32_t cp : body) {
    if (cp == U'_') {
      flush();
      continue;
    }
    if (!current.empty()) {
      const char32_t prev = current.back();
      const bool digit_boundary = u::is_digit(prev) != u::is_digit(cp);
      const bool camel = u::is_ascii_lower(prev) && u::is_ascii_upper(cp);
      if (digit_boundary || camel) flush();
    }
    current.push_back(cp);
  }
  flush();
  return words;
}

bool is_ignorable_mark(char32_t cp) {
  return cp == 0x0640 || (cp >= 0x064B && cp <= 0x065F) || cp == 0x0670 ||
         (cp >= 0x0300 && cp <= 0x036F);
}

char32_t map_persian_char(char32_t cp) {
  if (cp == 0x064A) return 0x06CC;
  if (cp == 0x0643) return 0x06A9;
  if (cp >= 0x0660 && cp <= 0x0669) return U'0' + (cp - 0x0660);
  if (cp >= 0x06F0 && cp <= 0x06F9) return U'0' + (cp - 0x06F0);
  return cp;
}

std::u32string normalize_persian_u32(std::u32string_view text) {
  std::u32string out;
  out.reserve(text.size());
  for (char32_t cp : text) {
    if (is_ignorable_mark(cp)) continue;
    out.push_back(map_persian_char(cp));
  }
  return out;
}

std::u32string normalize_elongation_u32(std::u32string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t run = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    run = (i > 0 && text[i] == text[i - 1]) ? run + 1 : 1;
    if (run <= 2) out.push_back(text[i]);
  }
  return out;
}

bool starts_with(std::u32string_view s, std::u32string_view prefix) {
  return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

bool persian_token_matches(std::u32string_view token) {
  if (token.empty()) return false;
  if (token.front() == U'@') return true;
  if (std::all_of(token.begin(), token.end(), u::is_digit)) return true;
  std::u32string lower;
  for (char32_t cp : token) lower.push_back(u::ascii_lower(cp));
  return starts_with(lower, U"http://") || starts_with(lower, U"https://") ||
         starts_with(lower, U"www.") || token == U"URL";
}

// Judged on the raw token and on the token as the rest of the pipeline will
// leave it, so "www." survives elongation and a second pass deletes nothing.
bool persian_token_deleted(std::u32string_view raw) {
  return persian_token_matches(raw) ||
         persian_token_matches(normalize_elongation_u32(normalize_persian_u32(normalize_elongation_u32(raw))));
}

}  // namespace

std::string segment_hashtags(std::string_view text) {
  const auto in = u::decode(text);
  std::u32string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    if (in[i] != U'#') {
      out.push_back(in[i++]);
      continue;
    }
    std::size_t j = i + 1;
    while (j < in.size() && in[j] != U'#' && is_hashtag_body(in[j])) ++j;
    const auto words = split_hashtag_body(std::u32string_view(in).substr(i + 1, j - i - 1));
    if (!words.empty()) {
      if (!out.empty() && !u::is_whitespace(out.back())) out.push_back(U' ');
      out += u::join(words);
    }
    i = j;
  }
  return u::encode(out);
}

std::string normalize_elongation(std::string_view text) {
  return u::encode(normalize_elongation_u32(u::decode(text)));
}

std::string apply_user_url_policy(std::string_view text, const PreprocessPolicy& policy) {
  auto words = u::split_whitespace(u::decode(text));
  std::vector<std::u32string> kept;
  kept.reserve(words.size() + 1);
  if (policy.language_mode == LanguageMode::EnglishLike) {
    const auto user = u::decode(policy.user_token);
    const auto n_users = std::count(words.begin(), words.end(), user);
    if (n_users >= 2) kept.push_back(u::decode(policy.collapsed_user_token));
    for (auto& w : words) {
      if (n_users >= 2 && w == user) continue;
      kept.push_back(w == U"URL" ? std::u32string(U"http") : std::move(w));
    }
  } else {
    for (auto& w : words) {
      if (!persian_token_deleted(w)) kept.push_back(std::move(w));
    }
  }
  return u::encode(u::join(kept));
}

std::string handle_emoji(std::string_view text, const PreprocessPolicy& policy) {
  const bool replace = policy.language_mode == LanguageMode::EnglishLike && policy.replace_emoji;
  if (replace && !policy.emoji_map) {
    throw Error(ErrorCode::MissingEmojiMap, "EnglishLike emoji replacement needs an emoji map");
  }
  const auto in = u::decode(text);
  if (std::none_of(in.begin(), in.end(), u::is_emoji)) return std::string(text);

  std::u32string out;
  out.reserve(in.size());
  std::size_t i = 0;
  std::string descriptor;
  while (i < in.size()) {
    if (!u::is_emoji(in[i])) {
      out.push_back(in[i++]);
      continue;
    }
    const std::size_t len =
        replace ? policy.emoji_map->match(std::u32string_view(in).substr(i), &descriptor) : 0;
    if (len > 0) {
      out.push_back(U' ');
      out += u::decode(descriptor);
      out.push_back(U' ');
      i += len;
    } else {
      ++i;
    }
  }
  return u::encode(u::collapse_whitespace(out));
}

std::string normalize_persian_chars(std::string_view text) {
  return u::encode(normalize_persian_u32(u::decode(text)));
}

RawDocument preprocess_document(const RawDocument& doc, const PreprocessPolicy& policy) {
  policy.validate();
  std::string text = handle_emoji(doc.text, policy);
  text = segment_hashtags(text);
  text = apply_user_url_policy(text, policy);
  text = normalize_elongation(text);
  if (policy.language_mode == LanguageMode::PersianLike) {
    // Character normalization can merge runs (e.g. two yeh forms), so the
    // elongation rule is re-applied to keep the pipeline idempotent.
    text = normalize_elongation(normalize_persian_chars(text));
  }
  text = u::encode(u::collapse_whitespace(u::decode(text)));
  if (text.empty()) {
    throw Error(ErrorCode::EmptyAfterPreprocess, "document '" + doc.id + "' is empty after preprocessing");
  }
  return RawDocument{doc.id, std::move(text), doc.label};
}

PreprocessBatch preprocess_corpus(std::span<const RawDocument> docs, const PreprocessPolicy& policy) {
  PreprocessBatch batch;
  batch.kept.reserve(docs.size());
  for (const auto& d : docs) {
    try {
      batch.kept.push_back(preprocess_document(d, policy));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyAfterPreprocess) throw;
      batch.rejected_ids.push_back(d.id);
    }
  }
  return batch;
}

}  // namespace offmask
