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

#ifndef OFFMASK_ATTENTION_HPP_
#define OFFMASK_ATTENTION_HPP_

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <string>

#include "offmask/error.hpp"
#include "offmask/masking.hpp"

namespace offmask {

/// Additive penalty applied to the complement of the mask before softmax.
inline constexpr double kMaskPenalty = 10000.0;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Row-wise softmax of `scores - penalty * (1 - mask)`.
///
/// `scores` is (queries x keys); the mask has one entry per key and is
/// broadcast over every query row, so column k of each row is shifted by
/// -penalty * (1 - mask[k]). Every returned row sums to one.
template <typename DerivedScores, typename DerivedMask>
MatrixX<typename DerivedScores::Scalar> attention_probabilities(
    const Eigen::MatrixBase<DerivedScores>& scores, const Eigen::MatrixBase<DerivedMask>& mask,
    typename DerivedScores::Scalar penalty = typename DerivedScores::Scalar(kMaskPenalty)) {
  using Scalar = typename DerivedScores::Scalar;
  if (mask.size() != scores.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "mask length " + std::to_string(mask.size()) +
                                              " != score columns " + std::to_string(scores.cols()));
  }
  const auto shift = (penalty * (Scalar(1) - mask.derived().template cast<Scalar>().array()))
                         .matrix()
                         .transpose()
                         .eval();
  MatrixX<Scalar> shifted = scores.rowwise() - shift;
  // Subtracting the row max keeps exp() in range; softmax is shift invariant.
  const VectorX<Scalar> row_max = shifted.rowwise().maxCoeff();
  shifted.colwise() -= row_max;
  // Eigen's vectorized exp clamps its argument and returns a subnormal where
  // libm underflows; flush those to an exact zero so masked columns vanish.
  const Scalar floor = std::log(std::numeric_limits<Scalar>::min());
  MatrixX<Scalar> probs =
      (shifted.array() < floor).select(Scalar(0), shifted.array().exp()).matrix();
  const VectorX<Scalar> row_sum = probs.rowwise().sum();
  probs.array().colwise() /= row_sum.array();
  return probs;
}

template <typename DerivedScores>
MatrixX<typename DerivedScores::Scalar> attention_probabilities(
    const Eigen::MatrixBase<DerivedScores>& scores, const AttentionMask& mask,
    typename DerivedScores::Scalar penalty = typename DerivedScores::Scalar(kMaskPenalty)) {
  return attention_probabilities(scores, mask.values, penalty);
}

/// softmax(Q K^T / sqrt(d) - penalty * (1 - mask)) V, returning the
/// probabilities through `weights` when non-null.
template <typename DerivedQ, typename DerivedK, typename DerivedV, typename DerivedMask>
MatrixX<typename DerivedQ::Scalar> scaled_dot_product_attention(
    const Eigen::MatrixBase<DerivedQ>& queries, const Eigen::MatrixBase<DerivedK>& keys,
    const Eigen::MatrixBase<DerivedV>& values, const Eigen::MatrixBase<DerivedMask>& mask,
    MatrixX<typename DerivedQ::Scalar>* weights = nullptr,
    typename DerivedQ::Scalar penalty = typename DerivedQ::Scalar(kMaskPenalty)) {
  using Scalar = typename DerivedQ::Scalar;
  if (queries.cols() != keys.cols() || keys.rows() != values.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "query/key/value shapes disagree");
  }
  const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(queries.cols()));
  MatrixX<Scalar> probs = attention_probabilities((queries * keys.transpose() * scale).eval(), mask, penalty);
  MatrixX<Scalar> out = probs * values;
  if (weights) *weights = std::move(probs);
  return out;
}

}  // namespace offmask

#endif  // OFFMASK_ATTENTION_HPP_
