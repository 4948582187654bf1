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

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <functional>

#include "offmask/cli.hpp"

namespace offmask::cli {

std::string_view to_string(Command command) noexcept {
  switch (command) {
    case Command::Preprocess: return "preprocess";
    case Command::Tokenize: return "tokenize";
    case Command::BuildScores: return "build-scores";
    case Command::ScoreText: return "score-text";
    case Command::BuildMask: return "build-mask";
    case Command::TrainToy: return "train-toy";
    case Command::Eval: return "eval";
    case Command::Compare: return "compare";
    case Command::SweepThreshold: return "sweep-threshold";
    case Command::Synth: return "synth";
  }
  return "?";
}

int exit_code_for(ErrorFamily family) noexcept {
  switch (family) {
    case ErrorFamily::Usage: return kExitUsage;
    case ErrorFamily::Io: return kExitIo;
    case ErrorFamily::Data: return kExitData;
  }
  return kExitData;
}

std::vector<std::filesystem::path> RunConfig::inputs() const {
  std::vector<std::filesystem::path> out;
  for (const auto* p : {&input, &train, &vocab, &scores, &emoji_map, &label_map, &pred, &gold, &lexicon,
                        &eval_input}) {
    if (!p->empty()) out.push_back(*p);
  }
  return out;
}

namespace {

const CLI::Validator kOpenUnit(
    [](std::string& s) -> std::string {
      double v = 0;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size()) return "'" + s + "' is not a number";
      return v > 0.0 && v < 1.0 ? "" : "must lie strictly between 0 and 1, got " + s;
    },
    "(0,1)");

const CLI::Validator kUnitInterval(
    [](std::string& s) -> std::string {
      double v = 0;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size()) return "'" + s + "' is not a number";
      return v >= 0.0 && v <= 1.0 ? "" : "must lie in [0,1], got " + s;
    },
    "[0,1]");

std::array<std::size_t, kNumClasses> parse_expect_counts(const std::string& spec) {
  std::array<std::size_t, kNumClasses> counts{};
  std::array<bool, kNumClasses> given{};
  std::size_t start = 0;
  while (start <= spec.size()) {
    const auto end = std::min(spec.find(',', start), spec.size());
    const auto item = spec.substr(start, end - start);
    const auto eq = item.find('=');
    std::size_t value = 0;
    const char* first = item.data() + (eq == std::string::npos ? 0 : eq + 1);
    const char* last = item.data() + item.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (eq == std::string::npos || ec != std::errc() || ptr != last || first == last) {
      throw Error(ErrorCode::UsageError, "--expect-counts: expected NOT=<n>,OFF=<n>, got '" + spec + "'");
    }
    const auto name = item.substr(0, eq);
    if (name != "NOT" && name != "OFF") {
      throw Error(ErrorCode::UsageError, "--expect-counts: unknown class '" + name + "'");
    }
    const auto idx = static_cast<std::size_t>(index_of(name == "OFF" ? Label::OFF : Label::NOT));
    counts[idx] = value;
    given[idx] = true;
    start = end + 1;
  }
  if (!given[0] || !given[1]) {
    throw Error(ErrorCode::UsageError, "--expect-counts: both NOT and OFF are required");
  }
  return counts;
}

// Builds the option tree over a RunConfig and turns the raw strings into
// typed fields once CLI11 has finished.
class Parser {
 public:
  Parser() : app_("Offensive-score attention masks for offensive language detection.", "offmask") {
    app_.option_defaults()->always_capture_default();
    app_.require_subcommand(1);
    app_.fallthrough(false);
    add_preprocess();
    add_tokenize();
    add_build_scores();
    add_score_text();
    add_build_mask();
    add_train_toy();
    add_eval();
    add_compare();
    add_sweep();
    add_synth();
  }

  ParseResult parse(const std::vector<std::string>& args) {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app_.parse(reversed);
    } catch (const CLI::CallForHelp&) {
      return {std::nullopt, help_text()};
    } catch (const CLI::CallForAllHelp&) {
      return {std::nullopt, app_.help("", CLI::AppFormatMode::All)};
    } catch (const CLI::ParseError& e) {
      throw Error(ErrorCode::UsageError, e.what());
    }
    const auto* sub = selected();
    cfg_.command = commands_.at(sub);
    cfg_.args = args;
    finish();
    echo(*sub);
    check_inputs();
    return {std::move(cfg_), {}};
  }

 private:
  CLI::App* sub(Command command, const std::string& description) {
    auto* s = app_.add_subcommand(std::string(to_string(command)), description);
    commands_[s] = command;
    return s;
  }

  const CLI::App* selected() const {
    for (const auto& [s, c] : commands_) {
      if (s->parsed()) return s;
    }
    throw Error(ErrorCode::UsageError, "a subcommand is required");
  }

  std::string help_text() const {
    for (const auto& [s, c] : commands_) {
      if (s->parsed()) return s->help();
    }
    return app_.help();
  }

  void input_flag(CLI::App* s, const std::string& flag, std::filesystem::path& target,
                  const std::string& description, bool required = true) {
    auto* opt = s->add_option(flag, target, description);
    if (required) opt->required();
    input_flags_.push_back({s, flag, &target});
  }

  void output_flag(CLI::App* s, const std::string& flag, std::filesystem::path& target,
                   const std::string& description, bool required = true) {
    auto* opt = s->add_option(flag, target, description);
    if (required) opt->required();
  }

  void language_flag(CLI::App* s, const std::string& flag = "--lang") {
    s->add_option(flag, language_, "Language mode: en lowercases before WordPiece, fa does not")
        ->check(CLI::IsMember({"en", "fa"}));
  }

  void encode_flags(CLI::App* s, bool vocab_required = false) {
    input_flag(s, "--vocab", cfg_.vocab,
               vocab_required ? "WordPiece vocabulary, one token per line"
                              : "WordPiece vocabulary, one token per line (default: the training corpus's words)",
               vocab_required);
    s->add_option("--max-len", cfg_.max_len, "Sequence length including [CLS] and [SEP]")
        ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
  }

  void feature_flags(CLI::App* s, const std::string& flag) {
    s->add_option(flag, feature_mode_, "Feature weighting for the likelihoods")
        ->check(CLI::IsMember({"tfidf", "raw"}));
    s->add_flag("!--no-idf-smoothing", cfg_.tfidf.idf_smoothing, "Use ln(n/df)+1 instead of ln((1+n)/(1+df))+1");
    s->add_flag("!--no-l2", cfg_.tfidf.per_document_l2_normalize, "Skip per-document L2 normalization");
  }

  void strategy_flags(CLI::App* s) {
    s->add_option("--strategy", strategy_, "Attention mask strategy")
        ->check(CLI::IsMember({"classic", "additive", "threshold"}));
    threshold_flags(s);
  }

  void threshold_flags(CLI::App* s) {
    s->add_option("--threshold", cfg_.strategy.threshold, "Score threshold for the threshold strategy")
        ->check(kOpenUnit);
    s->add_option("--fallback", fallback_, "All-zero threshold masks: keep zeros or use the classic mask")
        ->check(CLI::IsMember({"keep-zeros", "classic"}));
  }

  void training_flags(CLI::App* s) {
    s->add_option("--epochs", epochs_, "Training epochs")
        ->check(CLI::PositiveNumber)
        ->default_str("11 for en, 30 for fa");
    s->add_option("--lr", cfg_.train_config.learning_rate, "Learning rate")->check(CLI::PositiveNumber);
    s->add_option("--batch-size", cfg_.train_config.batch_size, "Mini-batch size")->check(CLI::PositiveNumber);
    s->add_option("--optimizer", optimizer_, "Optimizer")->check(CLI::IsMember({"adam", "sgd"}));
    s->add_option("--dim", cfg_.dim, "Model dimension")->check(CLI::PositiveNumber);
  }

  void add_preprocess() {
    auto* s = sub(Command::Preprocess, "Normalize a raw corpus TSV (id, text, label)");
    s->add_option("--mode", language_, "Language mode")->check(CLI::IsMember({"en", "fa"}));
    input_flag(s, "--input", cfg_.input, "Raw corpus TSV");
    output_flag(s, "--output", cfg_.output, "Preprocessed corpus TSV");
    input_flag(s, "--emoji-map", cfg_.emoji_map, "Emoji descriptor TSV (required for --mode en)", false);
    s->add_flag("!--drop-emoji", cfg_.replace_emoji, "en: drop emoji instead of replacing them");
    input_flag(s, "--label-map", cfg_.label_map, "TSV mapping source labels to NOT/OFF", false);
    s->add_option("--expect-counts", expect_counts_, "Fail unless class counts match, e.g. NOT=8840,OFF=4400");
    s->add_option("--max-len", cfg_.max_len, "Truncation length recorded for the tokenizer stage")
        ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
  }

  void add_tokenize() {
    auto* s = sub(Command::Tokenize, "WordPiece-encode a preprocessed corpus TSV");
    encode_flags(s, true);
    language_flag(s, "--mode");
    input_flag(s, "--input", cfg_.input, "Preprocessed corpus TSV");
    output_flag(s, "--output", cfg_.output, "Tokenized TSV (id, tokens, ids, n_real, label)");
  }

  void add_build_scores() {
    auto* s = sub(Command::BuildScores, "Fit token offensive scores on a labeled corpus");
    input_flag(s, "--train", cfg_.train, "Preprocessed, labeled corpus TSV");
    encode_flags(s);
    language_flag(s);
    feature_flags(s, "--mode");
    output_flag(s, "--out", cfg_.output, "Score table TSV");
    s->add_option("--report-threshold", cfg_.report_threshold, "Report how many tokens score at least this")
        ->check(kUnitInterval);
  }

  void add_score_text() {
    auto* s = sub(Command::ScoreText, "Show the offensive score of every token in an utterance");
    input_flag(s, "--scores", cfg_.scores, "Score table TSV");
    s->add_option("--text", cfg_.text, "Utterance to score")->required();
    input_flag(s, "--vocab", cfg_.vocab, "WordPiece vocabulary (whole words are looked up without it)", false);
    s->add_option("--max-len", cfg_.max_len, "Sequence length when --vocab is given")
        ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
    language_flag(s);
    output_flag(s, "--output", cfg_.output, "Also write the table as TSV", false);
  }

  void add_build_mask() {
    auto* s = sub(Command::BuildMask, "Build attention masks for a tokenized TSV");
    strategy_flags(s);
    input_flag(s, "--scores", cfg_.scores, "Score table TSV (unused by classic)", false);
    input_flag(s, "--input", cfg_.input, "Tokenized TSV from `tokenize`");
    output_flag(s, "--output", cfg_.output, "Mask TSV (id, mask)");
  }

  void add_train_toy() {
    auto* s = sub(Command::TrainToy, "Train the single-layer attention classifier");
    input_flag(s, "--train", cfg_.train, "Preprocessed, labeled corpus TSV");
    input_flag(s, "--scores", cfg_.scores, "Score table TSV (unused by classic)", false);
    encode_flags(s);
    language_flag(s);
    strategy_flags(s);
    training_flags(s);
    s->add_option("--seed", cfg_.train_config.seed, "Seed for initialization and batch order");
    output_flag(s, "--model-out", cfg_.model_out, "Model file");
    input_flag(s, "--eval", cfg_.eval_input, "Corpus TSV to predict after training", false);
    output_flag(s, "--pred-out", cfg_.pred_out, "Predictions TSV for --eval (id, label, p_off)", false);
  }

  void add_eval() {
    auto* s = sub(Command::Eval, "Score predictions against gold labels");
    input_flag(s, "--gold", cfg_.gold, "Labeled TSV with id and label columns");
    input_flag(s, "--pred", cfg_.pred, "Predictions TSV with id and label columns", false);
    input_flag(s, "--lexicon", cfg_.lexicon, "Classify --gold texts with this word list instead", false);
    input_flag(s, "--label-map", cfg_.label_map, "TSV mapping source labels to NOT/OFF", false);
    output_flag(s, "--output", cfg_.output, "Report JSON", false);
  }

  void add_compare() {
    auto* s = sub(Command::Compare, "Cross-validate mask strategies over folds and seeds");
    input_flag(s, "--train", cfg_.train, "Preprocessed, labeled corpus TSV");
    encode_flags(s);
    language_flag(s);
    feature_flags(s, "--feature-mode");
    s->add_option("--folds", cfg_.folds, "Stratified folds")->check(CLI::Range(std::size_t{2}, std::size_t{1000}));
    s->add_option("--seeds", cfg_.seeds, "Comma-separated seeds; the first also fixes the split")
        ->delimiter(',');
    s->add_option("--strategies", strategy_names_, "Comma-separated strategies")
        ->delimiter(',')
        ->check(CLI::IsMember({"classic", "additive", "threshold"}));
    threshold_flags(s);
    training_flags(s);
    s->add_option("--jobs", cfg_.jobs, "Worker threads; results do not depend on it")
        ->check(CLI::Range(1u, 1024u));
    output_flag(s, "--out", cfg_.output, "Results TSV (strategy, threshold, fold, seed, macro_f1)");
  }

  void add_sweep() {
    auto* s = sub(Command::SweepThreshold, "Evaluate the threshold strategy over a grid on a held-out fold");
    input_flag(s, "--train", cfg_.train, "Preprocessed, labeled corpus TSV");
    encode_flags(s);
    language_flag(s);
    feature_flags(s, "--feature-mode");
    s->add_option("--min", cfg_.sweep_min, "Lowest threshold");
    s->add_option("--max", cfg_.sweep_max, "Highest threshold");
    s->add_option("--step", cfg_.sweep_step, "Grid step");
    s->add_option("--folds", cfg_.folds, "The first of this many stratified folds is held out")
        ->check(CLI::Range(std::size_t{2}, std::size_t{1000}));
    s->add_option("--seed", cfg_.train_config.seed, "Seed for the split, initialization and batch order");
    training_flags(s);
    output_flag(s, "--out", cfg_.output, "Sweep TSV (threshold, macro_f1)");
  }

  void add_synth() {
    auto* s = sub(Command::Synth, "Generate a planted-token synthetic corpus");
    s->add_option("--n-docs", cfg_.synthetic.n_docs, "Documents")->check(CLI::PositiveNumber);
    s->add_option("--vocab-size", cfg_.synthetic_vocab, "Regular words")->check(CLI::PositiveNumber);
    s->add_option("--planted", cfg_.planted, "Planted offensive words")->check(CLI::PositiveNumber);
    s->add_option("--min-words", cfg_.synthetic.min_length, "Shortest document")->check(CLI::PositiveNumber);
    s->add_option("--max-words", cfg_.synthetic.max_length, "Longest document")->check(CLI::PositiveNumber);
    s->add_option("--noise", cfg_.synthetic.noise_rate, "Fraction of labels flipped")->check(kUnitInterval);
    s->add_option("--seed", cfg_.synthetic.seed, "Generator seed");
    output_flag(s, "--output", cfg_.output, "Corpus TSV");
    output_flag(s, "--vocab-out", cfg_.vocab_out, "Vocabulary file");
    output_flag(s, "--lexicon-out", cfg_.lexicon_out, "Planted words, one per line", false);
  }

  void finish() {
    cfg_.language = language_ == "fa" ? LanguageMode::PersianLike : LanguageMode::EnglishLike;
    cfg_.feature_mode = parse_feature_mode(feature_mode_);
    cfg_.train_config.optimizer = parse_optimizer(optimizer_);
    cfg_.train_config.epochs = epochs_ > 0 ? epochs_ : cfg_.language == LanguageMode::PersianLike ? 30 : 11;
    cfg_.strategy.kind = parse_mask_kind(strategy_);
    cfg_.strategy.degenerate_fallback =
        fallback_ == "classic" ? DegenerateFallback::FallBackToClassic : DegenerateFallback::KeepZeros;
    if (!expect_counts_.empty()) cfg_.expect_counts = parse_expect_counts(expect_counts_);

    for (const auto& name : strategy_names_) {
      MaskStrategy s = cfg_.strategy;
      s.kind = parse_mask_kind(name);
      cfg_.strategies.push_back(s);
    }

    switch (cfg_.command) {
      case Command::Preprocess:
        if (cfg_.language == LanguageMode::EnglishLike && cfg_.replace_emoji && cfg_.emoji_map.empty()) {
          throw Error(ErrorCode::UsageError, "--emoji-map is required with --mode en");
        }
        break;
      case Command::BuildMask:
      case Command::TrainToy:
        if (cfg_.strategy.kind != MaskKind::Classic && cfg_.scores.empty()) {
          throw Error(ErrorCode::UsageError, "--scores is required for --strategy " + strategy_);
        }
        if (!cfg_.eval_input.empty() && cfg_.pred_out.empty()) {
          throw Error(ErrorCode::UsageError, "--pred-out is required with --eval");
        }
        break;
      case Command::Eval:
        if (cfg_.pred.empty() == cfg_.lexicon.empty()) {
          throw Error(ErrorCode::UsageError, "exactly one of --pred and --lexicon is required");
        }
        break;
      case Command::Compare:
        if (cfg_.seeds.empty()) throw Error(ErrorCode::UsageError, "--seeds: at least one seed is required");
        break;
      case Command::SweepThreshold:
        try {
          threshold_grid(cfg_.sweep_min, cfg_.sweep_max, cfg_.sweep_step);
        } catch (const Error& e) {
          throw Error(ErrorCode::InvalidGrid, std::string("--min/--max/--step: ") + e.what());
        }
        break;
      case Command::Synth:
        if (cfg_.synthetic.min_length > cfg_.synthetic.max_length) {
          throw Error(ErrorCode::UsageError, "--min-words must not exceed --max-words");
        }
        if (cfg_.planted > cfg_.synthetic_vocab) {
          throw Error(ErrorCode::UsageError, "--planted must not exceed --vocab-size");
        }
        break;
      default:
        break;
    }
  }

  void echo(const CLI::App& s) {
    for (const auto* opt : s.get_options()) {
      const auto& name = opt->get_name();
      if (name == "--help" || name.empty()) continue;
      std::string value;
      if (opt->count() > 0) {
        for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
      } else if (name == "--epochs") {
        value = std::to_string(cfg_.train_config.epochs);
      } else {
        value = opt->get_default_str();
      }
      cfg_.options[name] = value;
    }
  }

  void check_inputs() const {
    const CLI::App* s = selected();
    for (const auto& f : input_flags_) {
      if (f.app != s || f.target->empty()) continue;
      std::ifstream probe(*f.target, std::ios::binary);
      std::error_code ec;
      if (!probe || std::filesystem::is_directory(*f.target, ec)) {
        throw Error(ErrorCode::IoFailure, f.flag + ": cannot read '" + f.target->string() + "'");
      }
    }
  }

  struct InputFlag {
    const CLI::App* app;
    std::string flag;
    const std::filesystem::path* target;
  };

  CLI::App app_;
  std::map<const CLI::App*, Command> commands_;
  std::vector<InputFlag> input_flags_;
  RunConfig cfg_;

  std::string language_ = "en";
  int epochs_ = 0;
  std::string feature_mode_ = "tfidf";
  std::string optimizer_ = "adam";
  std::string strategy_ = "classic";
  std::string fallback_ = "keep-zeros";
  std::string expect_counts_;
  std::vector<std::string> strategy_names_{"classic", "additive", "threshold"};
};

}  // namespace

ParseResult parse_and_validate(const std::vector<std::string>& args) {
  Parser parser;
  return parser.parse(args);
}

}  // namespace offmask::cli
