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

#ifndef OFFMASK_SCORING_HPP_
#define OFFMASK_SCORING_HPP_

#include <Eigen/Core>

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "offmask/labels.hpp"
#include "offmask/tokenizer.hpp"

namespace offmask {

enum class FeatureMode { RawCount, TfIdf };

std::string_view to_string(FeatureMode mode) noexcept;
/// Accepts "raw" / "tfidf".
FeatureMode parse_feature_mode(std::string_view name);

struct TfIdfConfig {
  /// idf = ln((1 + n) / (1 + df)) + 1 when on, ln(n / df) + 1 when off.
  bool idf_smoothing = true;
  bool per_document_l2_normalize = true;
};

/// Per-class token mass of a multinomial Naive Bayes fit.
///
/// `feature_mass` has one row per class (indexed by `index_of(Label)`) and one
/// column per vocabulary id; special-token columns stay zero. `vocab_size` is
/// |V| in the Laplace denominator and counts only the regular (non-special)
/// vocabulary entries, so each class's likelihoods sum to one over them.
struct NBModel {
  using MassArray = Eigen::Array<double, kNumClasses, Eigen::Dynamic>;

  std::shared_ptr<const Vocabulary> vocab;
  MassArray feature_mass;
  Eigen::Array<double, kNumClasses, 1> class_total;
  std::size_t vocab_size = 0;
  FeatureMode mode = FeatureMode::TfIdf;
  /// Ids that occurred at least once in training.
  std::vector<bool> seen;
  std::string corpus_fingerprint;

  /// (N_yi + 1) / (N_y + |V|).
  double likelihood(TokenId id, Label y) const;
  /// Same, for a token absent from training (N_yi = 0).
  double unseen_likelihood(Label y) const;
};

/// SHA-256 over each document's label and real-span tokens, in order.
std::string corpus_fingerprint(std::span<const TokenSequence> docs, std::span<const Label> labels);

/// Fits per-class token mass. Summation runs in document order, then token-id
/// order, so results are bit-reproducible.
NBModel fit_nb(std::span<const TokenSequence> docs, std::span<const Label> labels,
               std::shared_ptr<const Vocabulary> vocab, const TfIdfConfig& config, FeatureMode mode);

double smoothed_likelihood(const NBModel& model, std::string_view token, Label y);

double sigmoid(double x) noexcept;
/// S(log(theta_off / theta_not)), evaluated in the log domain.
double offensive_score(double theta_off, double theta_not) noexcept;
double offensive_score(const NBModel& model, std::string_view token);

struct ScoreProvenance {
  std::string corpus_fingerprint;
  FeatureMode mode = FeatureMode::TfIdf;
  /// ISO-8601 UTC.
  std::string created = "1970-01-01T00:00:00Z";

  friend bool operator==(const ScoreProvenance&, const ScoreProvenance&) = default;
};

/// Token -> offensive score database. Scores lie in [0, 1]; special tokens
/// are never stored.
class ScoreTable {
 public:
  ScoreTable() = default;
  explicit ScoreTable(ScoreProvenance provenance) : provenance_(std::move(provenance)) {}

  /// Throws MalformedScoreFile for an out-of-range score, a special token, or
  /// a duplicate.
  void insert(std::string token, double score);

  std::optional<double> find(std::string_view token) const;
  bool contains(std::string_view token) const { return entries_.find(token) != entries_.end(); }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t count_at_least(double threshold) const;

  const std::map<std::string, double, std::less<>>& entries() const noexcept { return entries_; }
  const ScoreProvenance& provenance() const noexcept { return provenance_; }

  friend bool operator==(const ScoreTable&, const ScoreTable&) = default;

 private:
  std::map<std::string, double, std::less<>> entries_;
  ScoreProvenance provenance_;
};

/// One entry per regular token seen in training.
ScoreTable build_score_table(const NBModel& model, std::string created = "1970-01-01T00:00:00Z");

/// TSV `token<TAB>score` under `# key value` provenance lines.
std::string format_score_table(const ScoreTable& table);
ScoreTable parse_score_table(std::string_view contents, std::string_view source = "<memory>");
void save_score_table(const ScoreTable& table, const std::filesystem::path& path);
ScoreTable load_score_table(const std::filesystem::path& path);

}  // namespace offmask

#endif  // OFFMASK_SCORING_HPP_
