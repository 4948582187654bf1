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

#include "offmask/scoring.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "offmask/io.hpp"
#include "offmask/random.hpp"
#include "support/test_support.hpp"

namespace offmask {
namespace {

using testing::vocab_of;

struct Corpus {
  std::shared_ptr<const Vocabulary> vocab;
  std::vector<TokenSequence> docs;
  std::vector<Label> labels;
};

Corpus toy_corpus() {
  Corpus c;
  c.vocab = vocab_of({"bad", "dog", "good"});
  for (const auto& [text, label] : std::vector<std::pair<std::string, Label>>{
           {"bad bad", Label::OFF}, {"bad dog", Label::OFF}, {"good dog", Label::NOT}}) {
    c.docs.push_back(encode(text, *c.vocab, {.max_tokens = 8}));
    c.labels.push_back(label);
  }
  return c;
}

NBModel fit_raw(const Corpus& c) { return fit_nb(c.docs, c.labels, c.vocab, {}, FeatureMode::RawCount); }

TEST(FitNb, ToyCorpusCounts) {
  const auto c = toy_corpus();
  const auto m = fit_raw(c);
  const auto bad = *c.vocab->find("bad");
  EXPECT_EQ(m.feature_mass(index_of(Label::OFF), bad), 3.0);
  EXPECT_EQ(m.class_total(index_of(Label::OFF)), 4.0);
  EXPECT_EQ(m.class_total(index_of(Label::NOT)), 2.0);
  EXPECT_EQ(m.vocab_size, 3u);
}

TEST(FitNb, ToyCorpusLikelihoods) {
  const auto m = fit_raw(toy_corpus());
  EXPECT_NEAR(smoothed_likelihood(m, "bad", Label::OFF), 4.0 / 7.0, 1e-15);
  EXPECT_NEAR(smoothed_likelihood(m, "good", Label::NOT), 0.4, 1e-15);
  EXPECT_NEAR(smoothed_likelihood(m, "bad", Label::NOT), 0.2, 1e-15);
}

TEST(FitNb, ToyCorpusScore) {
  const auto m = fit_raw(toy_corpus());
  EXPECT_NEAR(offensive_score(m, "bad"), 20.0 / 27.0, 1e-12);
}

TEST(FitNb, UnseenTokenInEmptyClass) {
  NBModel m;
  m.vocab_size = 5;
  m.class_total.setZero();
  EXPECT_DOUBLE_EQ(m.unseen_likelihood(Label::OFF), 1.0 / 5.0);
  const auto fitted = fit_raw(toy_corpus());
  EXPECT_DOUBLE_EQ(smoothed_likelihood(fitted, "never-seen", Label::OFF), 1.0 / 7.0);
}

TEST(FitNb, MissingClass) {
  auto c = toy_corpus();
  c.docs.pop_back();
  c.labels.pop_back();
  EXPECT_OFFMASK_ERROR(fit_raw(c), ErrorCode::MissingClass);
}

TEST(FitNb, LengthMismatch) {
  auto c = toy_corpus();
  c.labels.pop_back();
  EXPECT_OFFMASK_ERROR(fit_raw(c), ErrorCode::LengthMismatch);
}

TEST(OffensiveScore, EqualLikelihoodsGiveHalf) {
  EXPECT_DOUBLE_EQ(offensive_score(0.3, 0.3), 0.5);
  EXPECT_NEAR(offensive_score(4.0 / 7.0, 0.2), 20.0 / 27.0, 1e-12);
}

TEST(OffensiveScore, StableForExtremeRatios) {
  EXPECT_NEAR(offensive_score(1e-300, 1.0), 1e-300, 1e-310);
  EXPECT_DOUBLE_EQ(offensive_score(1.0, 1e-300), 1.0);
  EXPECT_DOUBLE_EQ(sigmoid(-800.0), 0.0);
  EXPECT_DOUBLE_EQ(sigmoid(800.0), 1.0);
}

TEST(ScoreTable, ToyTableHasThreeEntries) {
  const auto table = build_score_table(fit_raw(toy_corpus()));
  ASSERT_EQ(table.size(), 3u);
  EXPECT_TRUE(table.contains("bad"));
  EXPECT_TRUE(table.contains("dog"));
  EXPECT_TRUE(table.contains("good"));
  EXPECT_FALSE(table.contains("[CLS]"));
  for (const auto& [token, score] : table.entries()) {
    EXPECT_GE(score, 0.0);
    EXPECT_LE(score, 1.0);
  }
  // bad = 20/27, dog = (2/7)/(2/7+2/5) = 5/12, good = (1/7)/(1/7+2/5) = 5/19.
  EXPECT_EQ(table.count_at_least(0.6), 1u);
  EXPECT_EQ(table.count_at_least(0.4), 2u);
  EXPECT_EQ(table.count_at_least(0.0), 3u);
  EXPECT_NEAR(*table.find("dog"), 5.0 / 12.0, 1e-12);
  EXPECT_NEAR(*table.find("good"), 5.0 / 19.0, 1e-12);
}

TEST(ScoreTable, InsertValidation) {
  ScoreTable t;
  t.insert("a", 0.5);
  EXPECT_OFFMASK_ERROR(t.insert("a", 0.2), ErrorCode::MalformedScoreFile);
  EXPECT_OFFMASK_ERROR(t.insert("b", 1.5), ErrorCode::MalformedScoreFile);
  EXPECT_OFFMASK_ERROR(t.insert("c", -0.1), ErrorCode::MalformedScoreFile);
  EXPECT_OFFMASK_ERROR(t.insert("[SEP]", 0.5), ErrorCode::MalformedScoreFile);
  EXPECT_OFFMASK_ERROR(t.insert("", 0.5), ErrorCode::MalformedScoreFile);
}

TEST(ScoreFile, RoundTrip) {
  testing::TempDir dir;
  const auto table = build_score_table(fit_nb(toy_corpus().docs, toy_corpus().labels,
                                              toy_corpus().vocab, {}, FeatureMode::TfIdf),
                                       "2026-01-01T00:00:00Z");
  save_score_table(table, dir / "scores.tsv");
  const auto loaded = load_score_table(dir / "scores.tsv");
  EXPECT_EQ(loaded, table);
  EXPECT_EQ(loaded.provenance().mode, FeatureMode::TfIdf);
  EXPECT_EQ(loaded.provenance().created, "2026-01-01T00:00:00Z");
  EXPECT_EQ(loaded.provenance().corpus_fingerprint.size(), 64u);
}

TEST(ScoreFile, MalformedFiles) {
  EXPECT_OFFMASK_ERROR(parse_score_table("bad\t1.5\n"), ErrorCode::MalformedScoreFile);
  EXPECT_OFFMASK_ERROR(parse_score_table("bad\t0.5\nbad\t0.6\n"), ErrorCode::MalformedScoreFile);
  EXPECT_OFFMASK_ERROR(parse_score_table("bad\tabc\n"), ErrorCode::MalformedScoreFile);
  EXPECT_OFFMASK_ERROR(parse_score_table("bad 0.5\n"), ErrorCode::MalformedScoreFile);
  EXPECT_OFFMASK_ERROR(load_score_table("/nonexistent/scores.tsv"), ErrorCode::IoFailure);
}

TEST(ScoreFile, HashTokensAreEntriesNotComments) {
  const auto t = parse_score_table("# offmask-scores v1\n#tag\t0.25\n");
  EXPECT_EQ(t.find("#tag"), 0.25);
}

// --- independent oracles ----------------------------------------------------

// Counts word strings directly from whitespace-split text, never touching ids.
struct RawOracle {
  std::map<std::string, double> mass[kNumClasses];
  double total[kNumClasses] = {0, 0};
};

RawOracle raw_oracle(const std::vector<std::string>& texts, const std::vector<Label>& labels) {
  RawOracle o;
  for (std::size_t d = 0; d < texts.size(); ++d) {
    std::istringstream words(texts[d]);
    for (std::string w; words >> w;) {
      o.mass[index_of(labels[d])][w] += 1;
      o.total[index_of(labels[d])] += 1;
    }
  }
  return o;
}

std::map<std::string, double> tfidf_oracle(const std::vector<std::string>& texts,
                                           const std::vector<Label>& labels, Label y,
                                           bool smooth, bool l2) {
  std::vector<std::map<std::string, double>> tf(texts.size());
  std::map<std::string, double> df;
  for (std::size_t d = 0; d < texts.size(); ++d) {
    std::istringstream words(texts[d]);
    for (std::string w; words >> w;) tf[d][w] += 1;
    for (const auto& [w, n] : tf[d]) df[w] += 1;
  }
  const double n = static_cast<double>(texts.size());
  std::map<std::string, double> mass;
  for (std::size_t d = 0; d < texts.size(); ++d) {
    std::map<std::string, double> weight;
    double norm = 0;
    for (const auto& [w, count] : tf[d]) {
      const double idf = smooth ? std::log((1 + n) / (1 + df[w])) + 1 : std::log(n / df[w]) + 1;
      weight[w] = count * idf;
      norm += weight[w] * weight[w];
    }
    if (labels[d] != y) continue;
    for (const auto& [w, v] : weight) mass[w] += l2 ? v / std::sqrt(norm) : v;
  }
  return mass;
}

struct RandomCorpus {
  std::vector<std::string> words;
  std::vector<std::string> texts;
  std::vector<Label> labels;
  Corpus encoded;
};

RandomCorpus random_corpus(Rng& rng, std::size_t max_docs, std::size_t max_vocab) {
  RandomCorpus r;
  const auto v = 1 + rng.below(max_vocab);
  for (std::uint64_t i = 0; i < v; ++i) r.words.push_back("t" + std::to_string(i));
  const auto n = 2 + rng.below(max_docs - 1);
  for (std::uint64_t d = 0; d < n; ++d) {
    std::string text;
    const auto len = 1 + rng.below(6);
    for (std::uint64_t k = 0; k < len; ++k) text += r.words[rng.below(v)] + " ";
    r.texts.push_back(text);
    r.labels.push_back(d < 2 ? static_cast<Label>(d) : static_cast<Label>(rng.below(2)));
  }
  r.encoded.vocab = vocab_of(r.words);
  for (const auto& t : r.texts) r.encoded.docs.push_back(encode(t, *r.encoded.vocab, {.max_tokens = 16}));
  r.encoded.labels = r.labels;
  return r;
}

TEST(ScoringOracle, RawCountMatchesBruteForce) {
  Rng rng(101);
  for (int trial = 0; trial < 25; ++trial) {
    const auto r = random_corpus(rng, 6, 10);
    const auto m = fit_raw(r.encoded);
    const auto o = raw_oracle(r.texts, r.labels);
    for (Label y : {Label::NOT, Label::OFF}) {
      EXPECT_EQ(m.class_total(index_of(y)), o.total[index_of(y)]);
      for (const auto& w : r.words) {
        const auto it = o.mass[index_of(y)].find(w);
        const double expected_mass = it == o.mass[index_of(y)].end() ? 0.0 : it->second;
        EXPECT_EQ(m.feature_mass(index_of(y), *r.encoded.vocab->find(w)), expected_mass);
        const double theta = (expected_mass + 1) / (o.total[index_of(y)] + static_cast<double>(r.words.size()));
        EXPECT_DOUBLE_EQ(smoothed_likelihood(m, w, y), theta);
      }
    }
  }
}

TEST(ScoringOracle, TfIdfMatchesIndependentComputation) {
  Rng rng(102);
  for (int trial = 0; trial < 25; ++trial) {
    const auto r = random_corpus(rng, 8, 10);
    for (bool smooth : {true, false}) {
      for (bool l2 : {true, false}) {
        const auto m = fit_nb(r.encoded.docs, r.labels, r.encoded.vocab,
                              {.idf_smoothing = smooth, .per_document_l2_normalize = l2},
                              FeatureMode::TfIdf);
        for (Label y : {Label::NOT, Label::OFF}) {
          const auto mass = tfidf_oracle(r.texts, r.labels, y, smooth, l2);
          double total = 0;
          for (const auto& w : r.words) {
            const auto it = mass.find(w);
            const double expected = it == mass.end() ? 0.0 : it->second;
            total += expected;
            EXPECT_NEAR(m.feature_mass(index_of(y), *r.encoded.vocab->find(w)), expected, 1e-12);
          }
          EXPECT_NEAR(m.class_total(index_of(y)), total, 1e-12);
        }
      }
    }
  }
}

// --- properties -------------------------------------------------------------

TEST(ScoringProperties, LikelihoodsSumToOne) {
  Rng rng(103);
  for (int trial = 0; trial < 50; ++trial) {
    const auto r = random_corpus(rng, 20, 30);
    for (FeatureMode mode : {FeatureMode::RawCount, FeatureMode::TfIdf}) {
      const auto m = fit_nb(r.encoded.docs, r.labels, r.encoded.vocab, {}, mode);
      for (Label y : {Label::NOT, Label::OFF}) {
        double sum = 0;
        for (const auto& w : r.words) sum += smoothed_likelihood(m, w, y);
        EXPECT_NEAR(sum, 1.0, 1e-9);
        EXPECT_NEAR(m.feature_mass.row(index_of(y)).sum(), m.class_total(index_of(y)),
                    1e-9 * std::max(1.0, m.class_total(index_of(y))));
      }
    }
  }
}

TEST(ScoringProperties, ClosedFormEquivalence) {
  Rng rng(104);
  for (int trial = 0; trial < 50; ++trial) {
    const auto r = random_corpus(rng, 20, 30);
    const auto m = fit_nb(r.encoded.docs, r.labels, r.encoded.vocab, {}, FeatureMode::TfIdf);
    for (const auto& w : r.words) {
      const double a = smoothed_likelihood(m, w, Label::OFF);
      const double b = smoothed_likelihood(m, w, Label::NOT);
      EXPECT_NEAR(offensive_score(m, w), a / (a + b), 1e-12);
    }
  }
}

TEST(ScoringProperties, LabelSwapMirrorsScores) {
  Rng rng(105);
  for (int trial = 0; trial < 50; ++trial) {
    auto r = random_corpus(rng, 20, 30);
    const auto m = fit_nb(r.encoded.docs, r.labels, r.encoded.vocab, {}, FeatureMode::TfIdf);
    for (auto& l : r.encoded.labels) l = other(l);
    const auto swapped = fit_nb(r.encoded.docs, r.encoded.labels, r.encoded.vocab, {}, FeatureMode::TfIdf);
    for (const auto& w : r.words) {
      EXPECT_NEAR(offensive_score(swapped, w), 1.0 - offensive_score(m, w), 1e-12);
    }
  }
}

TEST(ScoringProperties, ExtraOffensiveOccurrenceNeverLowersScore) {
  Rng rng(106);
  for (int trial = 0; trial < 50; ++trial) {
    auto r = random_corpus(rng, 20, 30);
    const auto before = fit_raw(r.encoded);
    const auto& word = r.words[rng.below(r.words.size())];
    r.encoded.docs.push_back(encode(word, *r.encoded.vocab, {.max_tokens = 16}));
    r.encoded.labels.push_back(Label::OFF);
    const auto after = fit_raw(r.encoded);
    EXPECT_GE(offensive_score(after, word), offensive_score(before, word));
  }
}

TEST(ScoringProperties, FingerprintTracksContent) {
  const auto c = toy_corpus();
  const auto fp = corpus_fingerprint(c.docs, c.labels);
  EXPECT_EQ(fp, corpus_fingerprint(c.docs, c.labels));
  auto labels = c.labels;
  labels[0] = Label::NOT;
  EXPECT_NE(fp, corpus_fingerprint(c.docs, labels));
}

}  // namespace
}  // namespace offmask
