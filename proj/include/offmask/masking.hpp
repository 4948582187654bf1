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

#ifndef OFFMASK_MASKING_HPP_
#define OFFMASK_MASKING_HPP_

#include <Eigen/Core>

#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "offmask/scoring.hpp"
#include "offmask/tokenizer.hpp"

namespace offmask {

enum class MaskKind { Classic, AdditiveScore, Threshold };
enum class DegenerateFallback { KeepZeros, FallBackToClassic };

std::string_view to_string(MaskKind kind) noexcept;
/// Accepts "classic" / "additive" / "threshold".
MaskKind parse_mask_kind(std::string_view name);

struct MaskStrategy {
  MaskKind kind = MaskKind::Classic;
  /// Threshold only; must lie in (0, 1).
  double threshold = 0.6;
  DegenerateFallback degenerate_fallback = DegenerateFallback::KeepZeros;

  static MaskStrategy classic() { return {MaskKind::Classic}; }
  static MaskStrategy additive() { return {MaskKind::AdditiveScore}; }
  static MaskStrategy thresholded(double t,
                                  DegenerateFallback f = DegenerateFallback::KeepZeros) {
    return {MaskKind::Threshold, t, f};
  }

  void validate() const;
  friend bool operator==(const MaskStrategy&, const MaskStrategy&) = default;
};

/// One nonnegative value per sequence position; zero on padding.
struct AttentionMask {
  Eigen::VectorXd values;

  Eigen::Index size() const noexcept { return values.size(); }
};

AttentionMask classic_mask(const TokenSequence& seq);
/// padding -> 0, token in table -> 1 + score, anything else -> 1.
AttentionMask additive_score_mask(const TokenSequence& seq, const ScoreTable& table);
/// padding -> 0, [CLS]/[SEP] -> 1, score >= threshold -> 1, anything else
/// (including tokens missing from the table) -> 0.
AttentionMask threshold_mask(const TokenSequence& seq, const ScoreTable& table,
                             const MaskStrategy& strategy);
AttentionMask build_mask(const TokenSequence& seq, const ScoreTable& table,
                         const MaskStrategy& strategy);
std::vector<AttentionMask> build_masks(std::span<const TokenSequence> seqs, const ScoreTable& table,
                                       const MaskStrategy& strategy);

/// Inclusive grid min, min + step, ... <= max. Throws InvalidGrid unless
/// 0 < min < max < 1 and step > 0.
std::vector<double> threshold_grid(double min, double max, double step);

struct SweepPoint {
  double threshold = 0.0;
  double macro_f1 = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  /// Index of the best point; the lowest threshold wins ties.
  std::size_t best = 0;

  const SweepPoint& argmax() const { return points.at(best); }
};

/// End-to-end scorer for one threshold: receives the masks built for every
/// sequence and returns macro-F1.
using MaskEvaluator = std::function<double(double threshold, std::span<const AttentionMask> masks)>;

SweepResult sweep_thresholds(std::span<const TokenSequence> seqs, const ScoreTable& table,
                             double min, double max, double step, const MaskEvaluator& evaluator,
                             DegenerateFallback fallback = DegenerateFallback::KeepZeros);

}  // namespace offmask

#endif  // OFFMASK_MASKING_HPP_
