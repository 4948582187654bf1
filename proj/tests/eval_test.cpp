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

#include "offmask/eval.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include "offmask/random.hpp"
#include "offmask/synthetic.hpp"
#include "support/test_support.hpp"

namespace offmask {
namespace {

constexpr Label N = Label::NOT;
constexpr Label O = Label::OFF;

std::pair<std::vector<Label>, std::vector<Label>> from_confusion(std::size_t tn, std::size_t fp,
                                                                 std::size_t fn, std::size_t tp) {
  std::vector<Label> preds, golds;
  auto add = [&](std::size_t n, Label p, Label g) {
    for (std::size_t i = 0; i < n; ++i) {
      preds.push_back(p);
      golds.push_back(g);
    }
  };
  add(tn, N, N);
  add(fp, O, N);
  add(fn, N, O);
  add(tp, O, O);
  return {preds, golds};
}

TEST(ClassificationReport, HandComputedConfusion) {
  const auto [preds, golds] = from_confusion(50, 10, 5, 35);
  const auto r = classification_report(preds, golds);
  EXPECT_EQ(r.confusion, (ConfusionMatrix{50, 10, 5, 35}));
  EXPECT_NEAR(r[O].precision, 35.0 / 45.0, 1e-15);
  EXPECT_NEAR(r[O].recall, 35.0 / 40.0, 1e-15);
  EXPECT_NEAR(r[O].f1, 70.0 / 85.0, 1e-15);
  EXPECT_NEAR(r[N].precision, 50.0 / 55.0, 1e-15);
  EXPECT_NEAR(r[N].recall, 50.0 / 60.0, 1e-15);
  EXPECT_NEAR(r[N].f1, 100.0 / 115.0, 1e-15);
  EXPECT_NEAR(r.macro_f1, (70.0 / 85.0 + 100.0 / 115.0) / 2, 1e-15);
  // 0.846547..., quoted elsewhere to four places as 0.8466.
  EXPECT_NEAR(r.macro_f1, 0.8466, 1e-4);
}

TEST(ClassificationReport, PerfectPredictions) {
  const std::vector<Label> y{N, O, O, N, O};
  const auto r = classification_report(y, y);
  EXPECT_EQ(r.macro_f1, 1.0);
  for (Label c : {N, O}) {
    EXPECT_EQ(r[c].precision, 1.0);
    EXPECT_EQ(r[c].recall, 1.0);
  }
}

TEST(ClassificationReport, ZeroDivisionIsZero) {
  const std::vector<Label> preds{N, N, N};
  const std::vector<Label> golds{N, N, N};
  const auto r = classification_report(preds, golds);
  EXPECT_EQ(r[O].precision, 0.0);
  EXPECT_EQ(r[O].recall, 0.0);
  EXPECT_EQ(r[O].f1, 0.0);
  EXPECT_EQ(r.macro_f1, 0.5);
}

TEST(ClassificationReport, Errors) {
  const std::vector<Label> a{N, O};
  const std::vector<Label> b{N};
  EXPECT_OFFMASK_ERROR(classification_report(a, b), ErrorCode::LengthMismatch);
  EXPECT_OFFMASK_ERROR(classification_report({}, {}), ErrorCode::EmptyInput);
}

// Published per-class F1 values and their printed macro averages.
struct PublishedRow {
  const char* model;
  double not_f1, off_f1, macro;
};
constexpr PublishedRow kPublished[] = {
    {"NULI", 0.9063, 0.7435, 0.8249},         {"NULI+additive", 0.9091, 0.7473, 0.8282},
    {"Kungfupanda", 0.8973, 0.7300, 0.8136},  {"Kungfupanda+additive", 0.9085, 0.7595, 0.8340},
    {"KUISAIL", 0.9106, 0.7251, 0.8179},      {"KUISAIL+additive", 0.9087, 0.7422, 0.8254},
};

TEST(MacroF1, PublishedRowsRecompute) {
  for (const auto& row : kPublished) {
    const double f1s[] = {row.not_f1, row.off_f1};
    // Half a unit in the fourth decimal, plus room for binary representation.
    EXPECT_LE(std::abs(macro_f1(f1s) - row.macro), 5e-5 + 1e-12) << row.model;
  }
  const double nuli[] = {0.9063, 0.7435};
  EXPECT_NEAR(macro_f1(nuli), 0.8249, 5e-5);
}

TEST(MacroF1, ClassSwapInvariant) {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Label> preds, golds;
    const auto n = 1 + rng.below(50);
    for (std::uint64_t i = 0; i < n; ++i) {
      preds.push_back(static_cast<Label>(rng.below(2)));
      golds.push_back(static_cast<Label>(rng.below(2)));
    }
    const auto base = classification_report(preds, golds);
    for (auto& l : preds) l = other(l);
    for (auto& l : golds) l = other(l);
    EXPECT_NEAR(classification_report(preds, golds).macro_f1, base.macro_f1, 1e-15);
  }
}

TEST(ClassificationReport, PermutationEquivariant) {
  Rng rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::pair<Label, Label>> pairs;
    const auto n = 1 + rng.below(50);
    for (std::uint64_t i = 0; i < n; ++i) {
      pairs.emplace_back(static_cast<Label>(rng.below(2)), static_cast<Label>(rng.below(2)));
    }
    auto split = [](const auto& ps) {
      std::vector<Label> p, g;
      for (const auto& [a, b] : ps) {
        p.push_back(a);
        g.push_back(b);
      }
      return classification_report(p, g);
    };
    const auto before = split(pairs);
    rng.shuffle(std::span(pairs));
    const auto after = split(pairs);
    EXPECT_EQ(before.confusion, after.confusion);
    EXPECT_EQ(before.macro_f1, after.macro_f1);
  }
}

TEST(SignTest, BinomialTail) {
  const std::vector<double> all_positive(5, 0.1);
  EXPECT_NEAR(sign_test_p_value(all_positive), 1.0 / 32.0, 1e-15);
  const std::vector<double> mixed{0.1, 0.2, -0.1, 0.0, 0.3};
  // Zeros dropped; 3 of 4 positive: (C(4,3)+C(4,4))/16.
  EXPECT_NEAR(sign_test_p_value(mixed), 5.0 / 16.0, 1e-15);
  EXPECT_EQ(sign_test_p_value(std::vector<double>{0.0, 0.0}), 1.0);
}

TEST(LabelMap, Homogenization) {
  const auto map = LabelMap::defaults();
  EXPECT_EQ(homogenize_label("CAG", map), O);
  EXPECT_EQ(homogenize_label("OAG", map), O);
  EXPECT_EQ(homogenize_label("NAG", map), N);
  EXPECT_EQ(homogenize_label("0", map), N);
  EXPECT_EQ(homogenize_label("1", map), O);
  EXPECT_EQ(homogenize_label("OFF", map), O);
  EXPECT_OFFMASK_ERROR(homogenize_label("XYZ", map), ErrorCode::UnknownLabel);
}

TEST(LabelMap, LoadFromFile) {
  testing::TempDir dir;
  std::ofstream(dir / "map.tsv") << "HOF\tOFF\nNONE\tNOT\n";
  const auto map = LabelMap::load(dir / "map.tsv");
  EXPECT_EQ(homogenize_label("HOF", map), O);
  EXPECT_EQ(homogenize_label("NONE", map), N);
  EXPECT_OFFMASK_ERROR(homogenize_label("CAG", map), ErrorCode::UnknownLabel);
  std::ofstream(dir / "bad.tsv") << "HOF\tMAYBE\n";
  EXPECT_OFFMASK_ERROR(LabelMap::load(dir / "bad.tsv"), ErrorCode::MalformedInput);
}

TEST(Corpus, ParsesAndHomogenizesLabels) {
  const auto docs = parse_corpus_tsv("id\ttext\tlabel\na\thello\tCAG\nb\tworld\t0\nc\tquiet\t\n",
                                     LabelMap::defaults());
  ASSERT_EQ(docs.size(), 3u);
  EXPECT_EQ(docs[0].label, O);
  EXPECT_EQ(docs[1].label, N);
  EXPECT_FALSE(docs[2].label.has_value());
  EXPECT_OFFMASK_ERROR(labels_of(docs), ErrorCode::MissingClass);
  EXPECT_OFFMASK_ERROR(parse_corpus_tsv("id\ttext\tlabel\na\thi\tXYZ\n", LabelMap::defaults()),
                       ErrorCode::UnknownLabel);
  EXPECT_OFFMASK_ERROR(parse_corpus_tsv("wrong header\n", LabelMap::defaults()), ErrorCode::MalformedInput);
}

TEST(Corpus, CountManifest) {
  const std::vector<Label> labels{N, N, O};
  EXPECT_NO_THROW(check_class_counts(labels, {2, 1}));
  EXPECT_OFFMASK_ERROR(check_class_counts(labels, {1, 2}), ErrorCode::CountMismatch);
}

TEST(Lexicon, WholeTokenMatch) {
  const Lexicon lex{"idiot", "trash"};
  EXPECT_EQ(lexicon_classify({"a", "you idiot!", {}}, lex), O);
  EXPECT_EQ(lexicon_classify({"b", "idiotic behaviour", {}}, lex), N);
  EXPECT_EQ(lexicon_classify({"c", "nice day", {}}, lex), N);
  EXPECT_OFFMASK_ERROR(lexicon_classify({"d", "x", {}}, Lexicon{}), ErrorCode::EmptyLexicon);
}

TEST(Lexicon, PerfectOnNoiseFreePlantedCorpus) {
  const auto vocab = make_synthetic_vocabulary(50);
  std::vector<std::string> words(vocab.tokens().begin() + 4, vocab.tokens().end());
  const std::vector<std::string> planted(words.begin(), words.begin() + 5);
  const auto docs = make_synthetic_corpus(words, planted, {.n_docs = 400, .noise_rate = 0.0, .seed = 8});
  const Lexicon lex(planted.begin(), planted.end());
  std::vector<Label> preds;
  for (const auto& d : docs) preds.push_back(lexicon_classify(d, lex));
  EXPECT_EQ(classification_report(preds, labels_of(docs)).macro_f1, 1.0);
}

// --- stratified folds ---------------------------------------------------------

std::vector<Label> balanced(std::size_t n_not, std::size_t n_off, std::uint64_t seed) {
  std::vector<Label> labels(n_not, N);
  labels.insert(labels.end(), n_off, O);
  Rng rng(seed);
  rng.shuffle(std::span(labels));
  return labels;
}

void expect_partition(const std::vector<Fold>& folds, std::size_t n) {
  std::vector<int> seen(n, 0);
  for (const auto& f : folds) {
    for (std::size_t i : f.validation) ++seen[i];
    std::set<std::size_t> train(f.train.begin(), f.train.end());
    EXPECT_EQ(train.size() + f.validation.size(), n);
    for (std::size_t i : f.validation) EXPECT_FALSE(train.count(i));
  }
  for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(seen[i], 1) << i;
}

std::array<std::size_t, 2> counts_of(const std::vector<Label>& labels, const std::vector<std::size_t>& idx) {
  std::array<std::size_t, 2> c{0, 0};
  for (std::size_t i : idx) ++c[static_cast<std::size_t>(index_of(labels[i]))];
  return c;
}

TEST(StratifiedKFold, EvenSplit) {
  const auto labels = balanced(50, 50, 1);
  const auto folds = stratified_kfold(labels, 5, 7);
  ASSERT_EQ(folds.size(), 5u);
  expect_partition(folds, labels.size());
  for (const auto& f : folds) EXPECT_EQ(counts_of(labels, f.validation), (std::array<std::size_t, 2>{10, 10}));
}

TEST(StratifiedKFold, UnevenSplitWithinOne) {
  const auto labels = balanced(52, 48, 2);
  const auto folds = stratified_kfold(labels, 5, 7);
  expect_partition(folds, labels.size());
  for (const auto& f : folds) {
    const auto c = counts_of(labels, f.validation);
    EXPECT_LE(std::abs(static_cast<double>(c[0]) - 10.4), 1.0);
    EXPECT_LE(std::abs(static_cast<double>(c[1]) - 9.6), 1.0);
  }
}

TEST(StratifiedKFold, RandomizedProperties) {
  Rng rng(40);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng.below(6);
    const auto labels = balanced(k + rng.below(40), k + rng.below(40), rng.next());
    const auto seed = rng.next();
    const auto folds = stratified_kfold(labels, k, seed);
    expect_partition(folds, labels.size());
    const double n = static_cast<double>(labels.size());
    const auto total = class_counts(labels);
    for (const auto& f : folds) {
      const auto c = counts_of(labels, f.validation);
      const double share = static_cast<double>(f.validation.size()) / n;
      for (int y = 0; y < 2; ++y) {
        EXPECT_LE(std::abs(static_cast<double>(c[y]) - static_cast<double>(total[y]) / static_cast<double>(k)), 1.0);
      }
      EXPECT_LE(std::abs(share * static_cast<double>(k) - 1.0) * n / static_cast<double>(k), 1.0 + 1e-9);
    }
    const auto again = stratified_kfold(labels, k, seed);
    for (std::size_t f = 0; f < k; ++f) EXPECT_EQ(again[f].validation, folds[f].validation);
  }
}

TEST(StratifiedKFold, Errors) {
  const auto labels = balanced(10, 3, 1);
  EXPECT_OFFMASK_ERROR(stratified_kfold(labels, 4, 1), ErrorCode::TooFewPerClass);
  EXPECT_OFFMASK_ERROR(stratified_kfold(labels, 1, 1), ErrorCode::UsageError);
  EXPECT_NO_THROW(stratified_kfold(labels, 3, 1));
}

// --- strategy comparison ---------------------------------------------------

class CompareTest : public ::testing::Test {
 protected:
  void SetUp() override {
    vocab = std::make_shared<const Vocabulary>(make_synthetic_vocabulary(40));
    std::vector<std::string> words(vocab->tokens().begin() + 4, vocab->tokens().end());
    const std::vector<std::string> planted(words.begin(), words.begin() + 3);
    corpus = make_synthetic_corpus(words, planted,
                                   {.n_docs = 150, .min_length = 4, .max_length = 8, .seed = 5});
    config.encode.max_tokens = 12;
    config.train.epochs = 3;
    config.train.batch_size = 32;
    config.dim = 8;
  }

  std::shared_ptr<const Vocabulary> vocab;
  LabeledCorpus corpus;
  CompareConfig config;
};

TEST_F(CompareTest, DeterministicAndOrdered) {
  const std::vector<MaskStrategy> strategies{MaskStrategy::classic(), MaskStrategy::additive(),
                                             MaskStrategy::thresholded(0.6)};
  const std::vector<std::uint64_t> seeds{1, 2};
  const auto a = compare_strategies(corpus, vocab, strategies, 3, seeds, config);
  ASSERT_EQ(a.rows.size(), 3u * 3u * 2u);
  std::size_t i = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t f = 0; f < 3; ++f) {
      for (auto seed : seeds) {
        EXPECT_EQ(a.rows[i].strategy, strategies[s]);
        EXPECT_EQ(a.rows[i].fold, f);
        EXPECT_EQ(a.rows[i].seed, seed);
        EXPECT_GE(a.rows[i].macro_f1, 0.0);
        EXPECT_LE(a.rows[i].macro_f1, 1.0);
        ++i;
      }
    }
  }
  const auto b = compare_strategies(corpus, vocab, strategies, 3, seeds, config);
  EXPECT_EQ(format_compare_tsv(a), format_compare_tsv(b));

  auto parallel = config;
  parallel.jobs = 4;
  EXPECT_EQ(format_compare_tsv(compare_strategies(corpus, vocab, strategies, 3, seeds, parallel)),
            format_compare_tsv(a));

  ASSERT_EQ(a.averages().size(), 3u);
  EXPECT_EQ(a.paired_differences(strategies[1], strategies[0]).size(), 6u);
}

TEST_F(CompareTest, EmptyStrategyListGivesEmptyTable) {
  const std::vector<std::uint64_t> seeds{1};
  const auto r = compare_strategies(corpus, vocab, {}, 3, seeds, config);
  EXPECT_TRUE(r.rows.empty());
  EXPECT_EQ(format_compare_tsv(r), "strategy\tthreshold\tfold\tseed\tmacro_f1\n");
}

TEST_F(CompareTest, ScoreTablesSeeOnlyTrainingDocuments) {
  const std::vector<MaskStrategy> strategies{MaskStrategy::classic()};
  const std::vector<std::uint64_t> seeds{1};
  const auto r = compare_strategies(corpus, vocab, strategies, 3, seeds, config);
  const auto seqs = encode_corpus(corpus, *vocab, config.encode);
  const auto labels = labels_of(corpus);
  ASSERT_EQ(r.fold_fingerprints.size(), 3u);
  for (std::size_t f = 0; f < 3; ++f) {
    std::vector<TokenSequence> train_seqs, with_val;
    std::vector<Label> train_labels, with_val_labels;
    for (std::size_t i : r.folds[f].train) {
      train_seqs.push_back(seqs[i]);
      train_labels.push_back(labels[i]);
    }
    with_val = train_seqs;
    with_val_labels = train_labels;
    for (std::size_t i : r.folds[f].validation) {
      with_val.push_back(seqs[i]);
      with_val_labels.push_back(labels[i]);
    }
    EXPECT_EQ(r.fold_fingerprints[f], corpus_fingerprint(train_seqs, train_labels));
    EXPECT_NE(r.fold_fingerprints[f], corpus_fingerprint(with_val, with_val_labels));
  }
}

TEST_F(CompareTest, HoldoutSweepCoversGrid) {
  const auto result = sweep_threshold_holdout(corpus, vocab, 0.5, 0.8, 0.05, 3, 1, config);
  ASSERT_EQ(result.points.size(), 7u);
  for (const auto& p : result.points) EXPECT_GE(result.argmax().macro_f1, p.macro_f1);
  EXPECT_OFFMASK_ERROR(sweep_threshold_holdout(corpus, vocab, 0.8, 0.5, 0.05, 3, 1, config),
                       ErrorCode::InvalidGrid);
}

}  // namespace
}  // namespace offmask
