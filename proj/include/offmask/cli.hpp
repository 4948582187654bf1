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

#ifndef OFFMASK_CLI_HPP_
#define OFFMASK_CLI_HPP_

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "offmask/encoder.hpp"
#include "offmask/error.hpp"
#include "offmask/masking.hpp"
#include "offmask/preprocess.hpp"
#include "offmask/scoring.hpp"
#include "offmask/synthetic.hpp"

namespace offmask::cli {

enum class Command {
  Preprocess,
  Tokenize,
  BuildScores,
  ScoreText,
  BuildMask,
  TrainToy,
  Eval,
  Compare,
  SweepThreshold,
  Synth,
};

std::string_view to_string(Command command) noexcept;

/// Process exit status for each error family.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitData = 4;

int exit_code_for(ErrorFamily family) noexcept;

/// Fully validated invocation. Fields a subcommand does not use keep their
/// defaults; `options` echoes every flag of the chosen subcommand with the
/// value that will be used, defaults included.
struct RunConfig {
  Command command = Command::Preprocess;
  std::vector<std::string> args;
  std::map<std::string, std::string> options;

  std::filesystem::path input, output;
  std::filesystem::path train, vocab, scores;
  std::filesystem::path emoji_map, label_map;
  std::filesystem::path pred, gold, lexicon;
  std::filesystem::path model_out, eval_input, pred_out;
  std::filesystem::path vocab_out, lexicon_out;
  std::string text;

  LanguageMode language = LanguageMode::EnglishLike;
  bool replace_emoji = true;
  std::optional<std::array<std::size_t, kNumClasses>> expect_counts;
  std::size_t max_len = 64;

  FeatureMode feature_mode = FeatureMode::TfIdf;
  TfIdfConfig tfidf;
  double report_threshold = 0.6;

  MaskStrategy strategy;
  std::vector<MaskStrategy> strategies;

  TrainConfig train_config;
  Eigen::Index dim = 16;

  std::size_t folds = 5;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  unsigned jobs = 1;
  double sweep_min = 0.5, sweep_max = 0.8, sweep_step = 0.05;

  SyntheticCorpusConfig synthetic;
  std::size_t synthetic_vocab = 200;
  std::size_t planted = 10;

  /// Every input file the command reads, for the run manifest.
  std::vector<std::filesystem::path> inputs() const;
};

/// Either a config to run or the help text that was requested.
struct ParseResult {
  std::optional<RunConfig> config;
  std::string help;
};

/// `args` excludes the program name. Throws UsageError naming the offending
/// flag, or IoFailure when a referenced input file cannot be read.
ParseResult parse_and_validate(const std::vector<std::string>& args);

/// Executes a validated config. Human-readable results go to `out`.
/// Throws offmask::Error; see `main`.
void run(const RunConfig& config, std::ostream& out);

/// Entry point used by the executable: parses, runs, maps errors to exit
/// codes and reports them on `err`. Calls configure_logging first.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Configures the process logger from OFFMASK_LOG (trace, debug, info, warn,
/// error, off). Unset means warn.
void configure_logging();

}  // namespace offmask::cli

#endif  // OFFMASK_CLI_HPP_
