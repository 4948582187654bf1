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

#include "offmask/tokenizer.hpp"

#include "offmask/error.hpp"
#include "offmask/io.hpp"
#include "offmask/unicode.hpp"

namespace offmask {

namespace u = unicode;

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    const auto [it, inserted] = index_.emplace(tokens_[i], static_cast<TokenId>(i));
    if (!inserted) {
      throw Error(ErrorCode::DuplicateToken,
                  "token '" + tokens_[i] + "' repeated at line " + std::to_string(i + 1));
    }
  }
  auto special = [this](std::string_view name) {
    const auto id = find(name);
    if (!id) throw Error(ErrorCode::MissingSpecialToken, "vocabulary lacks " + std::string(name));
    return *id;
  };
  pad_ = special(kPad);
  unk_ = special(kUnk);
  cls_ = special(kCls);
  sep_ = special(kSep);
}

Vocabulary Vocabulary::parse(std::string_view contents) {
  auto lines = io::split_lines(contents);
  // A trailing blank line is a file terminator, not a token.
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return Vocabulary(std::move(lines));
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  return parse(io::read_file(path));
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  const auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> basic_tokenize(std::string_view text, bool lowercase) {
  std::vector<std::string> words;
  for (auto& word : u::split_whitespace(u::decode(text))) {
    std::u32string current;
    for (char32_t cp : word) {
      if (u::is_punctuation(cp)) {
        if (!current.empty()) words.push_back(u::encode(current));
        current.clear();
        words.push_back(u::encode(std::u32string(1, cp)));
      } else {
        current.push_back(lowercase ? u::ascii_lower(cp) : cp);
      }
    }
    if (!current.empty()) words.push_back(u::encode(current));
  }
  return words;
}

std::vector<std::string> wordpiece_tokenize(std::string_view word, const Vocabulary& vocab,
                                            std::size_t max_pieces) {
  const auto chars = u::decode(word);
  std::vector<std::string> pieces;
  std::size_t start = 0;
  while (start < chars.size()) {
    std::size_t end = chars.size();
    std::optional<std::string> match;
    while (start < end) {
      std::string candidate = start > 0 ? "##" : "";
      candidate += u::encode(std::u32string_view(chars).substr(start, end - start));
      if (vocab.contains(candidate)) {
        match = std::move(candidate);
        break;
      }
      --end;
    }
    if (!match || pieces.size() == max_pieces) return {std::string(Vocabulary::kUnk)};
    pieces.push_back(std::move(*match));
    start = end;
  }
  return pieces;
}

TokenSequence encode(std::string_view text, const Vocabulary& vocab, const EncodeOptions& options) {
  if (options.max_tokens < 2) {
    throw Error(ErrorCode::UsageError, "max_tokens must leave room for [CLS] and [SEP]");
  }
  std::vector<std::string> pieces;
  for (const auto& word : basic_tokenize(text, options.lowercase)) {
    for (auto& p : wordpiece_tokenize(word, vocab, options.max_tokens)) pieces.push_back(std::move(p));
  }
  if (pieces.empty()) throw Error(ErrorCode::EmptyInput, "no tokens in input text");

  const std::size_t budget = options.max_tokens - 2;
  if (pieces.size() > budget) pieces.resize(budget);

  TokenSequence seq;
  seq.ids.reserve(options.max_tokens);
  seq.tokens.reserve(options.max_tokens);
  auto push = [&](std::string_view token, TokenId id) {
    seq.tokens.emplace_back(token);
    seq.ids.push_back(id);
  };
  push(Vocabulary::kCls, vocab.cls_id());
  for (const auto& p : pieces) push(p, *vocab.find(p));
  push(Vocabulary::kSep, vocab.sep_id());
  seq.n_real = seq.ids.size();
  while (seq.ids.size() < options.max_tokens) push(Vocabulary::kPad, vocab.pad_id());
  return seq;
}

std::vector<std::string> decode(const TokenSequence& seq) {
  if (seq.n_real < 2) return {};
  return {seq.tokens.begin() + 1, seq.tokens.begin() + static_cast<std::ptrdiff_t>(seq.n_real) - 1};
}

}  // namespace offmask
