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

#ifndef OFFMASK_EVAL_HPP_
#define OFFMASK_EVAL_HPP_

#include <array>
#include <cstdint>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "offmask/corpus.hpp"
#include "offmask/encoder.hpp"
#include "offmask/labels.hpp"
#include "offmask/masking.hpp"
#include "offmask/scoring.hpp"
#include "offmask/tokenizer.hpp"

namespace offmask {

/// Binary confusion counts; OFF is the positive class.
struct ConfusionMatrix {
  std::size_t tn = 0, fp = 0, fn = 0, tp = 0;

  std::size_t total() const noexcept { return tn + fp + fn + tp; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Throws LengthMismatch / EmptyInput.
ConfusionMatrix confusion_matrix(std::span<const Label> preds, std::span<const Label> golds);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct ClassificationReport {
  std::array<ClassMetrics, kNumClasses> per_class;
  double macro_f1 = 0.0;
  ConfusionMatrix confusion;

  const ClassMetrics& operator[](Label y) const { return per_class[static_cast<std::size_t>(index_of(y))]; }
};

/// Harmonic mean; 0 when both inputs are 0.
double f1_score(double precision, double recall) noexcept;
/// Unweighted mean of per-class F1 values.
double macro_f1(std::span<const double> class_f1);

/// Precision and recall use 0 for 0/0.
ClassificationReport report_from_confusion(const ConfusionMatrix& cm);
ClassificationReport classification_report(std::span<const Label> preds, std::span<const Label> golds);

using Lexicon = std::set<std::string, std::less<>>;

/// OFF iff some lexicon entry is a whole token of the text (whitespace and
/// punctuation split, case-sensitive). Throws EmptyLexicon.
Label lexicon_classify(const RawDocument& doc, const Lexicon& lexicon);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

/// Shuffles each class's indices with `seed` and deals them round-robin into
/// k folds, continuing the deal across classes. Per-fold class counts are
/// within one of n_class / k. Throws TooFewPerClass (and UsageError for
/// k < 2).
std::vector<Fold> stratified_kfold(std::span<const Label> labels, std::size_t k, std::uint64_t seed);

/// One-sided sign test: P(X >= #positive) for X ~ Binomial(#nonzero, 1/2).
/// Zero differences are dropped; returns 1 when none remain.
double sign_test_p_value(std::span<const double> differences);

struct CompareConfig {
  EncodeOptions encode;
  FeatureMode feature_mode = FeatureMode::TfIdf;
  TfIdfConfig tfidf;
  TrainConfig train;
  Eigen::Index dim = 16;
  std::uint64_t split_seed = 1;
  /// Worker threads for the (fold, seed, strategy) grid; output order is
  /// fixed regardless.
  unsigned jobs = 1;
};

struct CompareRow {
  MaskStrategy strategy;
  std::size_t fold = 0;
  std::uint64_t seed = 0;
  double macro_f1 = 0.0;
};

struct StrategyAverage {
  MaskStrategy strategy;
  double mean_macro_f1 = 0.0;
};

struct CompareResult {
  /// Ordered by strategy (input order), then fold, then seed.
  std::vector<CompareRow> rows;
  /// Corpus fingerprint of the score table fitted for each fold.
  std::vector<std::string> fold_fingerprints;
  std::vector<Fold> folds;

  std::vector<StrategyAverage> averages() const;
  /// Per-cell macro-F1 of `a` minus that of `b`, paired by (fold, seed).
  std::vector<double> paired_differences(const MaskStrategy& a, const MaskStrategy& b) const;
};

/// Encodes every document, failing on the first one that yields no tokens.
std::vector<TokenSequence> encode_corpus(std::span<const RawDocument> docs, const Vocabulary& vocab,
                                         const EncodeOptions& options);

/// For each fold: fit the score table on the training split only. For each
/// seed: initialize the toy encoder from the seed, train it under every
/// strategy's masks and score macro-F1 on the validation split.
CompareResult compare_strategies(const LabeledCorpus& corpus, std::shared_ptr<const Vocabulary> vocab,
                                 std::span<const MaskStrategy> strategies, std::size_t folds,
                                 std::span<const std::uint64_t> seeds, const CompareConfig& config);

std::string format_compare_tsv(const CompareResult& result);

/// Threshold sweep on one stratified hold-out split (fold 0 of `folds`):
/// scores fitted and the encoder trained on the training part, macro-F1
/// measured on the validation part.
SweepResult sweep_threshold_holdout(const LabeledCorpus& corpus, std::shared_ptr<const Vocabulary> vocab,
                                    double min, double max, double step, std::size_t folds,
                                    std::uint64_t seed, const CompareConfig& config);

}  // namespace offmask

#endif  // OFFMASK_EVAL_HPP_
