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

#include "offmask/corpus.hpp"

#include "offmask/error.hpp"
#include "offmask/io.hpp"
#include "offmask/unicode.hpp"

namespace offmask {

namespace {

std::string sanitize_field(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

}  // namespace

RawDocument make_document(std::string id, std::string text, std::optional<Label> label) {
  if (unicode::collapse_whitespace(unicode::decode(text)).empty()) {
    throw Error(ErrorCode::EmptyDocument, "document '" + id + "' has no text");
  }
  return RawDocument{std::move(id), std::move(text), label};
}

std::vector<RawDocument> parse_corpus_tsv(std::string_view contents, const LabelMap& labels,
                                          std::string_view source) {
  const auto lines = io::split_lines(contents);
  if (lines.empty()) {
    throw Error(ErrorCode::MalformedInput, std::string(source) + ": missing header");
  }
  const auto header = io::split_tabs(lines.front());
  const bool has_label = header.size() == 3 && header[2] == "label";
  if (header.size() < 2 || header[0] != "id" || header[1] != "text" ||
      (header.size() == 3 && !has_label) || header.size() > 3) {
    throw Error(ErrorCode::MalformedInput,
                std::string(source) + ": header must be id<TAB>text[<TAB>label]");
  }
  std::vector<RawDocument> docs;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    const auto fields = io::split_tabs(lines[n]);
    const std::string where = std::string(source) + ":" + std::to_string(n + 1);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::MalformedInput, where + ": expected " +
                                                 std::to_string(header.size()) + " fields");
    }
    std::optional<Label> label;
    if (has_label && !fields[2].empty()) {
      try {
        label = homogenize_label(fields[2], labels);
      } catch (const Error& e) {
        throw Error(ErrorCode::UnknownLabel, where + ": unmapped label '" + fields[2] + "'");
      }
    }
    try {
      docs.push_back(make_document(fields[0], fields[1], label));
    } catch (const Error& e) {
      throw Error(e.code(), where + ": " + e.what());
    }
  }
  return docs;
}

std::vector<RawDocument> read_corpus_tsv(const std::filesystem::path& path, const LabelMap& labels) {
  return parse_corpus_tsv(io::read_file(path), labels, path.string());
}

std::string format_corpus_tsv(std::span<const RawDocument> docs) {
  std::string out = "id\ttext\tlabel\n";
  for (const auto& d : docs) {
    out += sanitize_field(d.id);
    out += '\t';
    out += sanitize_field(d.text);
    out += '\t';
    if (d.label) out += to_string(*d.label);
    out += '\n';
  }
  return out;
}

std::vector<Label> labels_of(std::span<const RawDocument> docs) {
  std::vector<Label> labels;
  labels.reserve(docs.size());
  for (const auto& d : docs) {
    if (!d.label) throw Error(ErrorCode::MissingClass, "document '" + d.id + "' is unlabeled");
    labels.push_back(*d.label);
  }
  return labels;
}

std::array<std::size_t, kNumClasses> class_counts(std::span<const Label> labels) {
  std::array<std::size_t, kNumClasses> counts{};
  for (Label y : labels) ++counts[index_of(y)];
  return counts;
}

void check_class_counts(std::span<const Label> labels,
                        const std::array<std::size_t, kNumClasses>& expected) {
  const auto got = class_counts(labels);
  if (got != expected) {
    throw Error(ErrorCode::CountMismatch,
                "expected NOT=" + std::to_string(expected[0]) + " OFF=" + std::to_string(expected[1]) +
                    ", found NOT=" + std::to_string(got[0]) + " OFF=" + std::to_string(got[1]));
  }
}

}  // namespace offmask
