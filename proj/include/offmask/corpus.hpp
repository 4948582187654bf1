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

#ifndef OFFMASK_CORPUS_HPP_
#define OFFMASK_CORPUS_HPP_

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "offmask/labels.hpp"

namespace offmask {

struct RawDocument {
  std::string id;
  std::string text;
  std::optional<Label> label;

  friend bool operator==(const RawDocument&, const RawDocument&) = default;
};

/// Documents that all carry a label.
using LabeledCorpus = std::vector<RawDocument>;

/// Builds a document, rejecting text that is empty after trimming
/// (EmptyDocument).
RawDocument make_document(std::string id, std::string text, std::optional<Label> label = {});

/// Reads `id<TAB>text<TAB>label` (header required). A missing or empty label
/// column yields an unlabeled document; anything else goes through `labels`.
std::vector<RawDocument> read_corpus_tsv(const std::filesystem::path& path,
                                         const LabelMap& labels = LabelMap::defaults());
/// Same format, parsed from memory. `source` only appears in messages.
std::vector<RawDocument> parse_corpus_tsv(std::string_view contents, const LabelMap& labels,
                                          std::string_view source = "<memory>");
std::string format_corpus_tsv(std::span<const RawDocument> docs);

/// Throws MissingClass unless every document is labeled.
std::vector<Label> labels_of(std::span<const RawDocument> docs);

/// Per-class document counts, indexed by `index_of(Label)`.
std::array<std::size_t, kNumClasses> class_counts(std::span<const Label> labels);

/// Validates class counts against an expected manifest (CountMismatch).
void check_class_counts(std::span<const Label> labels,
                        const std::array<std::size_t, kNumClasses>& expected);

}  // namespace offmask

#endif  // OFFMASK_CORPUS_HPP_
