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

#include "offmask/masking.hpp"

#include <cmath>
#include <string>

#include "offmask/error.hpp"

namespace offmask {

std::string_view to_string(MaskKind kind) noexcept {
  switch (kind) {
    case MaskKind::Classic: return "classic";
    case MaskKind::AdditiveScore: return "additive";
    case MaskKind::Threshold: return "threshold";
  }
  return "classic";
}

MaskKind parse_mask_kind(std::string_view name) {
  if (name == "classic") return MaskKind::Classic;
  if (name == "additive") return MaskKind::AdditiveScore;
  if (name == "threshold") return MaskKind::Threshold;
  throw Error(ErrorCode::UsageError, "unknown mask strategy '" + std::string(name) + "'");
}

void MaskStrategy::validate() const {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::UsageError, "threshold must lie in (0,1)");
  }
}

namespace {

bool is_cls_or_sep(std::string_view token) {
  return token == Vocabulary::kCls || token == Vocabulary::kSep;
}

}  // namespace

AttentionMask classic_mask(const TokenSequence& seq) {
  AttentionMask mask{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(seq.size()))};
  mask.values.head(static_cast<Eigen::Index>(seq.n_real)).setOnes();
  return mask;
}

AttentionMask additive_score_mask(const TokenSequence& seq, const ScoreTable& table) {
  AttentionMask mask = classic_mask(seq);
  for (std::size_t k = 0; k < seq.n_real; ++k) {
    if (const auto score = table.find(seq.tokens[k])) mask.values(static_cast<Eigen::Index>(k)) += *score;
  }
  return mask;
}

AttentionMask threshold_mask(const TokenSequence& seq, const ScoreTable& table,
                             const MaskStrategy& strategy) {
  strategy.validate();
  AttentionMask mask{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(seq.size()))};
  bool any_regular = false;
  for (std::size_t k = 0; k < seq.n_real; ++k) {
    const auto& token = seq.tokens[k];
    const auto i = static_cast<Eigen::Index>(k);
    if (is_cls_or_sep(token)) {
      mask.values(i) = 1.0;
      continue;
    }
    const auto score = table.find(token);
    if (score && *score >= strategy.threshold) {
      mask.values(i) = 1.0;
      any_regular = true;
    }
  }
  if (!any_regular && strategy.degenerate_fallback == DegenerateFallback::FallBackToClassic) {
    return classic_mask(seq);
  }
  return mask;
}

AttentionMask build_mask(const TokenSequence& seq, const ScoreTable& table,
                         const MaskStrategy& strategy) {
  switch (strategy.kind) {
    case MaskKind::Classic: return classic_mask(seq);
    case MaskKind::AdditiveScore: return additive_score_mask(seq, table);
    case MaskKind::Threshold: return threshold_mask(seq, table, strategy);
  }
  return classic_mask(seq);
}

std::vector<AttentionMask> build_masks(std::span<const TokenSequence> seqs, const ScoreTable& table,
                                       const MaskStrategy& strategy) {
  std::vector<AttentionMask> masks;
  masks.reserve(seqs.size());
  for (const auto& s : seqs) masks.push_back(build_mask(s, table, strategy));
  return masks;
}

std::vector<double> threshold_grid(double min, double max, double step) {
  if (!(min > 0.0 && min < max && max < 1.0)) {
    throw Error(ErrorCode::InvalidGrid, "grid bounds must satisfy 0 < min < max < 1");
  }
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidGrid, "grid step must be positive");
  // The epsilon absorbs representation error in (max - min) / step.
  const auto n = static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
  std::vector<double> grid;
  grid.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    grid.push_back(std::round((min + static_cast<double>(k) * step) * 1e12) / 1e12);
  }
  return grid;
}

SweepResult sweep_thresholds(std::span<const TokenSequence> seqs, const ScoreTable& table,
                             double min, double max, double step, const MaskEvaluator& evaluator,
                             DegenerateFallback fallback) {
  SweepResult result;
  for (double t : threshold_grid(min, max, step)) {
    const auto masks = build_masks(seqs, table, MaskStrategy::thresholded(t, fallback));
    result.points.push_back({t, evaluator(t, masks)});
    if (result.points.back().macro_f1 > result.points[result.best].macro_f1) {
      result.best = result.points.size() - 1;
    }
  }
  return result;
}

}  // namespace offmask
