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

#include "offmask/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "offmask/error.hpp"
#include "offmask/random.hpp"

namespace offmask {

Vocabulary make_synthetic_vocabulary(std::size_t n_words) {
  std::vector<std::string> tokens{std::string(Vocabulary::kPad), std::string(Vocabulary::kUnk),
                                  std::string(Vocabulary::kCls), std::string(Vocabulary::kSep)};
  for (std::size_t i = 0; i < n_words; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "w%03zu", i);
    tokens.emplace_back(buf);
  }
  return Vocabulary(std::move(tokens));
}

LabeledCorpus make_synthetic_corpus(std::span<const std::string> words,
                                    std::span<const std::string> planted,
                                    const SyntheticCorpusConfig& config) {
  if (words.empty()) throw Error(ErrorCode::MalformedInput, "synthetic corpus needs words");
  if (config.min_length == 0 || config.min_length > config.max_length) {
    throw Error(ErrorCode::UsageError, "document length range is empty");
  }
  if (!(config.noise_rate >= 0.0 && config.noise_rate <= 1.0)) {
    throw Error(ErrorCode::UsageError, "noise rate must lie in [0,1]");
  }
  const std::set<std::string, std::less<>> planted_set(planted.begin(), planted.end());
  for (const auto& p : planted_set) {
    if (std::find(words.begin(), words.end(), p) == words.end()) {
      throw Error(ErrorCode::MalformedInput, "planted word '" + p + "' is not in the word list");
    }
  }

  Rng rng(splitmix64(config.seed));
  LabeledCorpus corpus;
  corpus.reserve(config.n_docs);
  const std::size_t span = config.max_length - config.min_length + 1;
  for (std::size_t d = 0; d < config.n_docs; ++d) {
    const std::size_t len = config.min_length + static_cast<std::size_t>(rng.below(span));
    std::string text;
    bool offensive = false;
    for (std::size_t k = 0; k < len; ++k) {
      const auto& w = words[static_cast<std::size_t>(rng.below(words.size()))];
      offensive = offensive || planted_set.count(w) > 0;
      if (k) text += ' ';
      text += w;
    }
    char id[32];
    std::snprintf(id, sizeof id, "syn%05zu", d);
    corpus.push_back(RawDocument{id, std::move(text), offensive ? Label::OFF : Label::NOT});
  }

  const auto n_flip = static_cast<std::size_t>(
      std::llround(config.noise_rate * static_cast<double>(config.n_docs)));
  std::vector<std::size_t> order(config.n_docs);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));
  for (std::size_t i = 0; i < n_flip && i < order.size(); ++i) {
    auto& label = corpus[order[i]].label;
    label = other(*label);
  }
  return corpus;
}

}  // namespace offmask
