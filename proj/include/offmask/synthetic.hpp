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

#ifndef OFFMASK_SYNTHETIC_HPP_
#define OFFMASK_SYNTHETIC_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "offmask/corpus.hpp"
#include "offmask/tokenizer.hpp"

namespace offmask {

struct SyntheticCorpusConfig {
  std::size_t n_docs = 2000;
  std::size_t min_length = 8;
  std::size_t max_length = 16;
  double noise_rate = 0.1;
  std::uint64_t seed = 1;
};

/// `n_words` regular words "w000", "w001", ... after the four special tokens.
Vocabulary make_synthetic_vocabulary(std::size_t n_words);

/// Documents of uniformly drawn words. A document is OFF iff it contains a
/// planted word; then round(noise_rate * n_docs) distinct labels are flipped.
/// Throws MalformedInput if a planted word is not among `words`.
LabeledCorpus make_synthetic_corpus(std::span<const std::string> words,
                                    std::span<const std::string> planted,
                                    const SyntheticCorpusConfig& config);

}  // namespace offmask

#endif  // OFFMASK_SYNTHETIC_HPP_
