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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "offmask/error.hpp"
#include "offmask/io.hpp"
#include "offmask/random.hpp"

namespace offmask {

ConfusionMatrix confusion_matrix(std::span<const Label> preds, std::span<const Label> golds) {
  if (preds.size() != golds.size()) {
    throw Error(ErrorCode::LengthMismatch, "predictions and gold labels differ in length");
  }
  if (preds.empty()) throw Error(ErrorCode::EmptyInput, "no predictions to evaluate");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const bool p = preds[i] == Label::OFF;
    const bool g = golds[i] == Label::OFF;
    if (p && g) ++cm.tp;
    else if (p) ++cm.fp;
    else if (g) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

double f1_score(double precision, double recall) noexcept {
  const double denom = precision + recall;
  return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

double macro_f1(std::span<const double> class_f1) {
  if (class_f1.empty()) throw Error(ErrorCode::EmptyInput, "no class scores");
  return std::accumulate(class_f1.begin(), class_f1.end(), 0.0) / static_cast<double>(class_f1.size());
}

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

ClassMetrics metrics(std::size_t tp, std::size_t fp, std::size_t fn) {
  ClassMetrics m;
  m.precision = ratio(tp, tp + fp);
  m.recall = ratio(tp, tp + fn);
  m.f1 = f1_score(m.precision, m.recall);
  return m;
}

}  // namespace

ClassificationReport report_from_confusion(const ConfusionMatrix& cm) {
  ClassificationReport r;
  r.confusion = cm;
  // NOT as the positive class swaps the roles of tn/tp and fp/fn.
  r.per_class[index_of(Label::NOT)] = metrics(cm.tn, cm.fn, cm.fp);
  r.per_class[index_of(Label::OFF)] = metrics(cm.tp, cm.fp, cm.fn);
  const std::array<double, kNumClasses> f1s{r.per_class[0].f1, r.per_class[1].f1};
  r.macro_f1 = macro_f1(f1s);
  return r;
}

ClassificationReport classification_report(std::span<const Label> preds, std::span<const Label> golds) {
  return report_from_confusion(confusion_matrix(preds, golds));
}

Label lexicon_classify(const RawDocument& doc, const Lexicon& lexicon) {
  if (lexicon.empty()) throw Error(ErrorCode::EmptyLexicon, "lexicon has no entries");
  for (const auto& word : basic_tokenize(doc.text, false)) {
    if (lexicon.count(word)) return Label::OFF;
  }
  return Label::NOT;
}

std::vector<Fold> stratified_kfold(std::span<const Label> labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::UsageError, "k-fold needs k >= 2");
  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[index_of(labels[i])].push_back(i);
  for (int c = 0; c < kNumClasses; ++c) {
    if (by_class[c].size() < k) {
      throw Error(ErrorCode::TooFewPerClass,
                  std::string(to_string(static_cast<Label>(c))) + " has " +
                      std::to_string(by_class[c].size()) + " documents, fewer than k=" + std::to_string(k));
    }
  }

  Rng rng(splitmix64(seed));
  std::vector<std::size_t> fold_of(labels.size());
  std::size_t deal = 0;
  for (auto& members : by_class) {
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t idx : members) fold_of[idx] = deal++ % k;
  }

  std::vector<Fold> folds(k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t f = 0; f < k; ++f) {
      (fold_of[i] == f ? folds[f].validation : folds[f].train).push_back(i);
    }
  }
  return folds;
}

double sign_test_p_value(std::span<const double> differences) {
  std::size_t n = 0;
  std::size_t positive = 0;
  for (double d : differences) {
    if (d == 0.0) continue;
    ++n;
    positive += d > 0.0 ? 1 : 0;
  }
  if (n == 0) return 1.0;
  double p = 0.0;
  const double log_half_n = static_cast<double>(n) * std::log(0.5);
  for (std::size_t i = positive; i <= n; ++i) {
    const double log_choose = std::lgamma(static_cast<double>(n) + 1.0) -
                              std::lgamma(static_cast<double>(i) + 1.0) -
                              std::lgamma(static_cast<double>(n - i) + 1.0);
    p += std::exp(log_choose + log_half_n);
  }
  return std::min(1.0, p);
}

// ---------------------------------------------------------------------------
// Strategy comparison

std::vector<TokenSequence> encode_corpus(std::span<const RawDocument> docs, const Vocabulary& vocab,
                                         const EncodeOptions& options) {
  std::vector<TokenSequence> seqs;
  seqs.reserve(docs.size());
  for (const auto& d : docs) {
    try {
      seqs.push_back(encode(d.text, vocab, options));
    } catch (const Error& e) {
      throw Error(e.code(), "document '" + d.id + "': " + e.what());
    }
  }
  return seqs;
}

std::vector<StrategyAverage> CompareResult::averages() const {
  std::vector<StrategyAverage> out;
  std::vector<std::size_t> counts;
  for (const auto& row : rows) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const StrategyAverage& a) { return a.strategy == row.strategy; });
    if (it == out.end()) {
      out.push_back({row.strategy, 0.0});
      counts.push_back(0);
      it = out.end() - 1;
    }
    const auto pos = static_cast<std::size_t>(it - out.begin());
    it->mean_macro_f1 += row.macro_f1;
    ++counts[pos];
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].mean_macro_f1 /= static_cast<double>(counts[i]);
  return out;
}

std::vector<double> CompareResult::paired_differences(const MaskStrategy& a, const MaskStrategy& b) const {
  std::vector<double> diffs;
  for (const auto& ra : rows) {
    if (!(ra.strategy == a)) continue;
    for (const auto& rb : rows) {
      if (rb.strategy == b && rb.fold == ra.fold && rb.seed == ra.seed) {
        diffs.push_back(ra.macro_f1 - rb.macro_f1);
        break;
      }
    }
  }
  return diffs;
}

namespace {

template <typename T>
std::vector<T> gather(std::span<const T> items, std::span<const std::size_t> idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(items[i]);
  return out;
}

struct FoldData {
  std::vector<TokenSequence> train_seqs, val_seqs;
  std::vector<Label> train_labels, val_labels;
  ScoreTable table;
};

FoldData prepare_fold(std::span<const TokenSequence> seqs, std::span<const Label> labels,
                      const Fold& fold, const std::shared_ptr<const Vocabulary>& vocab,
                      const CompareConfig& config) {
  FoldData fd;
  fd.train_seqs = gather(seqs, fold.train);
  fd.val_seqs = gather(seqs, fold.validation);
  fd.train_labels = gather(labels, fold.train);
  fd.val_labels = gather(labels, fold.validation);
  const auto model = fit_nb(fd.train_seqs, fd.train_labels, vocab, config.tfidf, config.feature_mode);
  fd.table = build_score_table(model);
  return fd;
}

double run_cell(const FoldData& fd, const MaskStrategy& strategy, std::uint64_t seed,
                const Vocabulary& vocab, const CompareConfig& config) {
  const auto train_masks = build_masks(fd.train_seqs, fd.table, strategy);
  const auto val_masks = build_masks(fd.val_seqs, fd.table, strategy);
  auto init = ToyEncoderParams::initialize(static_cast<Eigen::Index>(vocab.size()), config.dim, seed);
  TrainConfig tc = config.train;
  tc.seed = seed;
  tc.track_loss = false;
  const auto trained = train(std::move(init), fd.train_seqs, train_masks, fd.train_labels, tc);
  const auto preds = predict(trained.params, fd.val_seqs, val_masks);
  return classification_report(preds, fd.val_labels).macro_f1;
}

template <typename F>
void parallel_for(std::size_t n, unsigned jobs, F&& body) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  const unsigned count = std::min<unsigned>(jobs, static_cast<unsigned>(n));
  for (unsigned w = 0; w < count; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

CompareResult compare_strategies(const LabeledCorpus& corpus, std::shared_ptr<const Vocabulary> vocab,
                                 std::span<const MaskStrategy> strategies, std::size_t folds,
                                 std::span<const std::uint64_t> seeds, const CompareConfig& config) {
  CompareResult result;
  if (strategies.empty() || seeds.empty()) return result;
  for (const auto& s : strategies) s.validate();

  const auto labels = labels_of(corpus);
  const auto seqs = encode_corpus(corpus, *vocab, config.encode);
  result.folds = stratified_kfold(labels, folds, config.split_seed);

  std::vector<FoldData> fold_data;
  fold_data.reserve(folds);
  for (const auto& fold : result.folds) {
    fold_data.push_back(prepare_fold(seqs, labels, fold, vocab, config));
    result.fold_fingerprints.push_back(fold_data.back().table.provenance().corpus_fingerprint);
  }

  const std::size_t n_cells = strategies.size() * folds * seeds.size();
  result.rows.resize(n_cells);
  parallel_for(n_cells, config.jobs, [&](std::size_t cell) {
    const std::size_t s = cell / (folds * seeds.size());
    const std::size_t f = (cell / seeds.size()) % folds;
    const std::size_t k = cell % seeds.size();
    result.rows[cell] = CompareRow{strategies[s], f, seeds[k],
                                   run_cell(fold_data[f], strategies[s], seeds[k], *vocab, config)};
  });
  return result;
}

std::string format_compare_tsv(const CompareResult& result) {
  std::string out = "strategy\tthreshold\tfold\tseed\tmacro_f1\n";
  for (const auto& row : result.rows) {
    out += std::string(to_string(row.strategy.kind)) + '\t';
    out += row.strategy.kind == MaskKind::Threshold ? io::format_double(row.strategy.threshold) : "-";
    out += '\t' + std::to_string(row.fold + 1) + '\t' + std::to_string(row.seed) + '\t';
    out += io::format_double(row.macro_f1) + '\n';
  }
  return out;
}

SweepResult sweep_threshold_holdout(const LabeledCorpus& corpus, std::shared_ptr<const Vocabulary> vocab,
                                    double min, double max, double step, std::size_t folds,
                                    std::uint64_t seed, const CompareConfig& config) {
  threshold_grid(min, max, step);  // validate before any work
  const auto labels = labels_of(corpus);
  const auto seqs = encode_corpus(corpus, *vocab, config.encode);
  const auto split = stratified_kfold(labels, folds, config.split_seed).front();
  const FoldData fd = prepare_fold(seqs, labels, split, vocab, config);

  // Masks are built over train + validation so the evaluator sees one span.
  std::vector<TokenSequence> all = fd.train_seqs;
  all.insert(all.end(), fd.val_seqs.begin(), fd.val_seqs.end());
  const std::size_t n_train = fd.train_seqs.size();

  auto evaluator = [&](double, std::span<const AttentionMask> masks) {
    const auto train_masks = masks.subspan(0, n_train);
    const auto val_masks = masks.subspan(n_train);
    auto init = ToyEncoderParams::initialize(static_cast<Eigen::Index>(vocab->size()), config.dim, seed);
    TrainConfig tc = config.train;
    tc.seed = seed;
    tc.track_loss = false;
    const auto trained = train(std::move(init), fd.train_seqs, train_masks, fd.train_labels, tc);
    const auto preds = predict(trained.params, fd.val_seqs, val_masks);
    return classification_report(preds, fd.val_labels).macro_f1;
  };
  return sweep_thresholds(all, fd.table, min, max, step, evaluator);
}

}  // namespace offmask
