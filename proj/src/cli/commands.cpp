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

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <iomanip>
#include <json.hpp>
#include <ostream>
#include <set>
#include <sstream>

#include "offmask/cli.hpp"
#include "offmask/eval.hpp"
#include "offmask/io.hpp"

#ifndef OFFMASK_VERSION
#define OFFMASK_VERSION "0.0.0"
#endif

namespace offmask::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Output files and their manifests

class Outputs {
 public:
  explicit Outputs(const RunConfig& config)
      : config_(config), start_(std::chrono::steady_clock::now()) {
    for (const auto& p : config.inputs()) {
      inputs_.push_back({{"path", p.string()}, {"sha256", io::sha256_file(p)}});
    }
  }

  /// Atomically writes `path`, then `<path>.manifest.json` beside it.
  void write(const fs::path& path, std::string_view contents) const {
    io::write_file_atomic(path, contents);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json m;
    m["tool"] = "offmask";
    m["version"] = OFFMASK_VERSION;
    m["command"] = std::string(to_string(config_.command));
    m["args"] = config_.args;
    m["config"] = config_.options;
    m["inputs"] = inputs_;
    m["output"] = {{"path", path.string()}, {"sha256", io::sha256_hex(contents)}};
    m["wall_time_seconds"] = wall;
    io::write_file_atomic(manifest_path(path), m.dump(2) + "\n");
    spdlog::info("wrote {}", path.string());
  }

  static fs::path manifest_path(const fs::path& output) {
    return fs::path(output.string() + ".manifest.json");
  }

 private:
  const RunConfig& config_;
  std::chrono::steady_clock::time_point start_;
  json inputs_ = json::array();
};

// ---------------------------------------------------------------------------
// TSV helpers

struct Tsv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string source;

  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw Error(ErrorCode::MalformedInput, source + ": missing column '" + std::string(name) + "'");
  }
};

Tsv read_tsv(const fs::path& path) {
  Tsv t;
  t.source = path.string();
  auto lines = io::split_lines(io::read_file(path));
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw Error(ErrorCode::MalformedInput, t.source + ": empty file");
  for (auto& f : io::split_tabs(lines[0])) t.header.push_back(std::string(f));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string> row;
    for (auto& f : io::split_tabs(lines[i])) row.push_back(std::string(f));
    if (row.size() != t.header.size()) {
      throw Error(ErrorCode::MalformedInput, t.source + ":" + std::to_string(i + 1) + ": expected " +
                                                 std::to_string(t.header.size()) + " fields");
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<std::string> split_spaces(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    const auto j = std::min(s.find(' ', i), s.size());
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

template <typename T>
T parse_number(std::string_view s, const std::string& where) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw Error(ErrorCode::MalformedInput, where + ": bad number '" + std::string(s) + "'");
  }
  return value;
}

LabelMap label_map_of(const RunConfig& c) {
  return c.label_map.empty() ? LabelMap::defaults() : LabelMap::load(c.label_map);
}

LabeledCorpus read_labeled(const fs::path& path, const LabelMap& map) {
  auto docs = read_corpus_tsv(path, map);
  labels_of(docs);
  return docs;
}

EncodeOptions encode_options(const RunConfig& c) {
  return {.max_tokens = c.max_len, .lowercase = c.language == LanguageMode::EnglishLike};
}

std::shared_ptr<const Vocabulary> load_vocab(const RunConfig& c) {
  return std::make_shared<const Vocabulary>(Vocabulary::load(c.vocab));
}

// Without --vocab, every distinct word of the training corpus becomes a
// whole-word entry, in sorted order.
std::shared_ptr<const Vocabulary> vocab_for(const RunConfig& c, std::span<const RawDocument> docs) {
  if (!c.vocab.empty()) return load_vocab(c);
  std::set<std::string> words;
  for (const auto& d : docs) {
    for (auto& w : basic_tokenize(d.text, c.language == LanguageMode::EnglishLike)) {
      if (!Vocabulary::is_special_token(w)) words.insert(std::move(w));
    }
  }
  std::vector<std::string> tokens{"[PAD]", "[UNK]", "[CLS]", "[SEP]"};
  tokens.insert(tokens.end(), words.begin(), words.end());
  spdlog::info("derived a {}-word vocabulary from the training corpus", words.size());
  return std::make_shared<const Vocabulary>(std::move(tokens));
}

ScoreTable load_scores_if_any(const RunConfig& c) {
  return c.scores.empty() ? ScoreTable{} : load_score_table(c.scores);
}

// Provenance timestamps come from SOURCE_DATE_EPOCH so reruns stay
// byte-identical; the wall clock only reaches the manifest.
std::string provenance_timestamp() {
  std::time_t t = 0;
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), v);
    if (ec == std::errc() && *ptr == '\0' && v >= 0) t = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

CompareConfig compare_config(const RunConfig& c) {
  CompareConfig cc;
  cc.encode = encode_options(c);
  cc.feature_mode = c.feature_mode;
  cc.tfidf = c.tfidf;
  cc.train = c.train_config;
  cc.dim = c.dim;
  cc.jobs = c.jobs;
  return cc;
}

// Six significant digits; for messages, not data files.
std::string short_number(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

std::string strategy_label(const MaskStrategy& s) {
  std::string out(to_string(s.kind));
  if (s.kind == MaskKind::Threshold) out += "@" + short_number(s.threshold);
  return out;
}

// ---------------------------------------------------------------------------
// Subcommands

void run_preprocess(const RunConfig& c, std::ostream& out) {
  PreprocessPolicy policy = c.language == LanguageMode::PersianLike
                                ? PreprocessPolicy::persian()
                                : PreprocessPolicy::english(c.emoji_map.empty() ? std::nullopt
                                                                                : std::optional(c.emoji_map));
  policy.replace_emoji = c.language == LanguageMode::EnglishLike && c.replace_emoji;
  policy.max_tokens = static_cast<int>(c.max_len);
  policy.validate();
  const Outputs outputs(c);

  const auto docs = read_corpus_tsv(c.input, label_map_of(c));
  if (c.expect_counts) {
    check_class_counts(labels_of(docs), *c.expect_counts);
  }
  const auto batch = preprocess_corpus(docs, policy);
  for (const auto& id : batch.rejected_ids) spdlog::warn("document '{}' is empty after preprocessing", id);
  outputs.write(c.output, format_corpus_tsv(batch.kept));
  out << "kept " << batch.kept.size() << " of " << docs.size() << " documents\n";
}

void run_tokenize(const RunConfig& c, std::ostream& out) {
  const Outputs outputs(c);
  const auto vocab = load_vocab(c);
  const auto docs = read_corpus_tsv(c.input, LabelMap::defaults());
  const auto seqs = encode_corpus(docs, *vocab, encode_options(c));
  std::string tsv = "id\ttokens\tids\tn_real\tlabel\n";
  for (std::size_t i = 0; i < docs.size(); ++i) {
    std::vector<std::string> ids;
    for (TokenId id : seqs[i].ids) ids.push_back(std::to_string(id));
    tsv += docs[i].id + '\t' + join(seqs[i].tokens, ' ') + '\t' + join(ids, ' ') + '\t' +
           std::to_string(seqs[i].n_real) + '\t' +
           (docs[i].label ? std::string(to_string(*docs[i].label)) : "") + '\n';
  }
  outputs.write(c.output, tsv);
  out << "tokenized " << docs.size() << " documents\n";
}

void run_build_scores(const RunConfig& c, std::ostream& out) {
  const Outputs outputs(c);
  const auto docs = read_labeled(c.train, LabelMap::defaults());
  const auto vocab = vocab_for(c, docs);
  const auto seqs = encode_corpus(docs, *vocab, encode_options(c));
  const auto model = fit_nb(seqs, labels_of(docs), vocab, c.tfidf, c.feature_mode);
  const auto table = build_score_table(model, provenance_timestamp());
  outputs.write(c.output, format_score_table(table));
  out << table.size() << " tokens scored; " << table.count_at_least(c.report_threshold)
      << " with score >= " << short_number(c.report_threshold) << '\n';
}

void run_score_text(const RunConfig& c, std::ostream& out) {
  const Outputs outputs(c);
  const auto table = load_score_table(c.scores);
  std::vector<std::string> tokens;
  if (c.vocab.empty()) {
    tokens = basic_tokenize(c.text, c.language == LanguageMode::EnglishLike);
  } else {
    tokens = decode(encode(c.text, Vocabulary::load(c.vocab), encode_options(c)));
  }
  if (tokens.empty()) throw Error(ErrorCode::EmptyInput, "--text: no tokens");
  std::string tsv = "token\tscore\tin_database\n";
  std::ostringstream aligned;
  std::size_t width = 5;
  for (const auto& t : tokens) width = std::max(width, t.size());
  aligned << std::left << std::setw(static_cast<int>(width)) << "token" << "  score   in_database\n";
  for (const auto& t : tokens) {
    const auto s = table.find(t);
    tsv += t + '\t' + (s ? io::format_double(*s) : "-") + '\t' + (s ? "yes" : "no") + '\n';
    aligned << std::left << std::setw(static_cast<int>(width)) << t << "  ";
    if (s) {
      aligned << std::fixed << std::setprecision(4) << *s << "  yes\n";
    } else {
      aligned << "-       no\n";
    }
  }
  out << aligned.str();
  if (!c.output.empty()) outputs.write(c.output, tsv);
}

std::vector<std::pair<std::string, TokenSequence>> read_tokenized(const fs::path& path) {
  const auto t = read_tsv(path);
  const auto id_col = t.column("id");
  const auto tok_col = t.column("tokens");
  const auto ids_col = t.column("ids");
  const auto n_col = t.column("n_real");
  std::vector<std::pair<std::string, TokenSequence>> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const auto where = t.source + ":" + std::to_string(r + 2);
    TokenSequence seq;
    for (auto& w : split_spaces(row[tok_col])) seq.tokens.push_back(std::move(w));
    for (const auto& w : split_spaces(row[ids_col])) seq.ids.push_back(parse_number<TokenId>(w, where));
    seq.n_real = parse_number<std::size_t>(row[n_col], where);
    if (seq.tokens.size() != seq.ids.size() || seq.n_real < 2 || seq.n_real > seq.ids.size()) {
      throw Error(ErrorCode::MalformedInput, where + ": inconsistent token sequence");
    }
    out.emplace_back(row[id_col], std::move(seq));
  }
  return out;
}

void run_build_mask(const RunConfig& c, std::ostream& out) {
  const Outputs outputs(c);
  const auto table = load_scores_if_any(c);
  const auto docs = read_tokenized(c.input);
  std::string tsv = "id\tmask\n";
  for (const auto& [id, seq] : docs) {
    const auto mask = build_mask(seq, table, c.strategy);
    std::string values;
    for (Eigen::Index i = 0; i < mask.size(); ++i) {
      if (i) values += ' ';
      values += io::format_double(mask.values(i));
    }
    tsv += id + '\t' + values + '\n';
  }
  outputs.write(c.output, tsv);
  out << "built " << docs.size() << " " << strategy_label(c.strategy) << " masks\n";
}

void run_train_toy(const RunConfig& c, std::ostream& out) {
  const Outputs outputs(c);
  const auto table = load_scores_if_any(c);
  const auto docs = read_labeled(c.train, LabelMap::defaults());
  const auto vocab = vocab_for(c, docs);
  const auto seqs = encode_corpus(docs, *vocab, encode_options(c));
  const auto masks = build_masks(seqs, table, c.strategy);
  const auto labels = labels_of(docs);

  auto config = c.train_config;
  config.track_loss = true;
  auto init = ToyEncoderParams::initialize(static_cast<Eigen::Index>(vocab->size()), c.dim, c.train_config.seed);
  const auto result = train(std::move(init), seqs, masks, labels, config);
  for (std::size_t e = 0; e < result.loss_history.size(); ++e) {
    spdlog::debug("epoch {} loss {:.6f}", e, result.loss_history[e]);
  }
  outputs.write(c.model_out, format_model(result.params));
  out << "training loss " << io::format_double(result.loss_history.front()) << " -> "
      << io::format_double(result.loss_history.back()) << '\n';

  if (c.eval_input.empty()) return;
  const auto eval_docs = read_corpus_tsv(c.eval_input, LabelMap::defaults());
  const auto eval_seqs = encode_corpus(eval_docs, *vocab, encode_options(c));
  const auto eval_masks = build_masks(eval_seqs, table, c.strategy);
  std::string tsv = "id\tlabel\tp_off\n";
  std::vector<Label> preds, golds;
  for (std::size_t i = 0; i < eval_docs.size(); ++i) {
    const double p = encode_and_classify(result.params, eval_seqs[i], eval_masks[i]);
    const Label y = p >= 0.5 ? Label::OFF : Label::NOT;
    tsv += eval_docs[i].id + '\t' + std::string(to_string(y)) + '\t' + io::format_double(p) + '\n';
    if (eval_docs[i].label) {
      preds.push_back(y);
      golds.push_back(*eval_docs[i].label);
    }
  }
  outputs.write(c.pred_out, tsv);
  if (!golds.empty()) {
    out << "eval macro-F1 " << io::format_double(classification_report(preds, golds).macro_f1) << '\n';
  }
}

json report_json(const ClassificationReport& r) {
  json j;
  for (Label y : {Label::NOT, Label::OFF}) {
    j["classes"][std::string(to_string(y))] = {
        {"precision", r[y].precision}, {"recall", r[y].recall}, {"f1", r[y].f1}};
  }
  j["macro_f1"] = r.macro_f1;
  j["confusion"] = {{"tn", r.confusion.tn}, {"fp", r.confusion.fp}, {"fn", r.confusion.fn}, {"tp", r.confusion.tp}};
  return j;
}

std::string report_text(const ClassificationReport& r) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4);
  s << "class  precision  recall  f1\n";
  for (Label y : {Label::NOT, Label::OFF}) {
    s << std::left << std::setw(5) << to_string(y) << "  " << std::setw(9) << r[y].precision << "  "
      << std::setw(6) << r[y].recall << "  " << r[y].f1 << '\n';
  }
  s << "macro-F1 " << r.macro_f1 << '\n';
  s << "confusion tn=" << r.confusion.tn << " fp=" << r.confusion.fp << " fn=" << r.confusion.fn
    << " tp=" << r.confusion.tp << '\n';
  return s.str();
}

std::map<std::string, Label> read_id_labels(const fs::path& path, const LabelMap& map) {
  const auto t = read_tsv(path);
  const auto id_col = t.column("id");
  const auto label_col = t.column("label");
  std::map<std::string, Label> out;
  for (const auto& row : t.rows) {
    if (!out.emplace(row[id_col], homogenize_label(row[label_col], map)).second) {
      throw Error(ErrorCode::MalformedInput, t.source + ": duplicate id '" + row[id_col] + "'");
    }
  }
  return out;
}

void run_eval(const RunConfig& c, std::ostream& out) {
  const Outputs outputs(c);
  const auto map = label_map_of(c);
  std::vector<Label> preds, golds;
  if (!c.lexicon.empty()) {
    Lexicon lexicon;
    for (const auto& line : io::split_lines(io::read_file(c.lexicon))) {
      if (!line.empty()) lexicon.insert(line);
    }
    const auto docs = read_labeled(c.gold, map);
    for (const auto& d : docs) {
      preds.push_back(lexicon_classify(d, lexicon));
      golds.push_back(*d.label);
    }
  } else {
    const auto gold = read_id_labels(c.gold, map);
    const auto pred = read_id_labels(c.pred, map);
    if (gold.size() != pred.size()) {
      throw Error(ErrorCode::LengthMismatch, "--pred has " + std::to_string(pred.size()) +
                                                 " ids, --gold has " + std::to_string(gold.size()));
    }
    for (const auto& [id, y] : gold) {
      const auto it = pred.find(id);
      if (it == pred.end()) throw Error(ErrorCode::LengthMismatch, "--pred lacks id '" + id + "'");
      preds.push_back(it->second);
      golds.push_back(y);
    }
  }
  const auto report = classification_report(preds, golds);
  out << report_text(report);
  if (!c.output.empty()) outputs.write(c.output, report_json(report).dump(2) + "\n");
}

void run_compare(const RunConfig& c, std::ostream& out) {
  const Outputs outputs(c);
  const auto corpus = read_labeled(c.train, LabelMap::defaults());
  const auto vocab = vocab_for(c, corpus);
  auto cc = compare_config(c);
  cc.split_seed = c.seeds.front();
  const auto result = compare_strategies(corpus, vocab, c.strategies, c.folds, c.seeds, cc);
  outputs.write(c.output, format_compare_tsv(result));

  out << std::fixed << std::setprecision(4);
  for (const auto& a : result.averages()) {
    out << std::left << std::setw(16) << strategy_label(a.strategy) << " mean macro-F1 " << a.mean_macro_f1 << '\n';
  }
  const auto classic = std::find_if(c.strategies.begin(), c.strategies.end(),
                                     [](const MaskStrategy& s) { return s.kind == MaskKind::Classic; });
  if (classic == c.strategies.end()) return;
  for (const auto& s : c.strategies) {
    if (s.kind == MaskKind::Classic) continue;
    const auto diffs = result.paired_differences(s, *classic);
    out << strategy_label(s) << " vs classic: sign-test p = " << std::setprecision(4)
        << sign_test_p_value(diffs) << " over " << diffs.size() << " cells\n";
  }
}

void run_sweep(const RunConfig& c, std::ostream& out) {
  const Outputs outputs(c);
  const auto corpus = read_labeled(c.train, LabelMap::defaults());
  const auto vocab = vocab_for(c, corpus);
  auto cc = compare_config(c);
  cc.split_seed = c.train_config.seed;
  const auto result = sweep_threshold_holdout(corpus, vocab, c.sweep_min, c.sweep_max, c.sweep_step, c.folds,
                                              c.train_config.seed, cc);
  std::string tsv = "threshold\tmacro_f1\n";
  for (const auto& p : result.points) tsv += io::format_double(p.threshold) + '\t' + io::format_double(p.macro_f1) + '\n';
  outputs.write(c.output, tsv);
  out << std::fixed << std::setprecision(4);
  for (const auto& p : result.points) out << "threshold " << p.threshold << "  macro-F1 " << p.macro_f1 << '\n';
  out << "best threshold " << result.argmax().threshold << '\n';
}

void run_synth(const RunConfig& c, std::ostream& out) {
  const Outputs outputs(c);
  const auto vocab = make_synthetic_vocabulary(c.synthetic_vocab);
  std::vector<std::string> words(vocab.tokens().begin() + 4, vocab.tokens().end());
  const std::vector<std::string> planted(words.begin(), words.begin() + static_cast<std::ptrdiff_t>(c.planted));
  const auto corpus = make_synthetic_corpus(words, planted, c.synthetic);
  outputs.write(c.output, format_corpus_tsv(corpus));
  outputs.write(c.vocab_out, join(vocab.tokens(), '\n') + '\n');
  if (!c.lexicon_out.empty()) outputs.write(c.lexicon_out, join(planted, '\n') + '\n');
  const auto counts = class_counts(labels_of(corpus));
  out << corpus.size() << " documents (" << counts[0] << " NOT, " << counts[1] << " OFF)\n";
}

}  // namespace

void run(const RunConfig& config, std::ostream& out) {
  spdlog::debug("running {}", to_string(config.command));
  switch (config.command) {
    case Command::Preprocess: return run_preprocess(config, out);
    case Command::Tokenize: return run_tokenize(config, out);
    case Command::BuildScores: return run_build_scores(config, out);
    case Command::ScoreText: return run_score_text(config, out);
    case Command::BuildMask: return run_build_mask(config, out);
    case Command::TrainToy: return run_train_toy(config, out);
    case Command::Eval: return run_eval(config, out);
    case Command::Compare: return run_compare(config, out);
    case Command::SweepThreshold: return run_sweep(config, out);
    case Command::Synth: return run_synth(config, out);
  }
}

void configure_logging() {
  auto logger = spdlog::get("offmask");
  if (!logger) {
    logger = spdlog::stderr_logger_st("offmask");
    logger->set_pattern("offmask: %l: %v");
  }
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  const char* env = std::getenv("OFFMASK_LOG");
  if (!env || !*env) return;
  const auto level = spdlog::level::from_str(env);
  // from_str maps anything unknown to off; only accept it when asked for.
  if (level == spdlog::level::off && std::string_view(env) != "off") {
    spdlog::warn("ignoring unknown OFFMASK_LOG level '{}'", env);
    return;
  }
  spdlog::set_level(level);
}

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  configure_logging();
  try {
    const auto parsed = parse_and_validate(args);
    if (!parsed.config) {
      out << parsed.help;
      return kExitOk;
    }
    run(*parsed.config, out);
    return kExitOk;
  } catch (const Error& e) {
    err << "offmask: error: " << e.what() << '\n';
    return exit_code_for(e.family());
  } catch (const std::exception& e) {
    err << "offmask: internal error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace offmask::cli
