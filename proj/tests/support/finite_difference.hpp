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

// Central finite-difference oracle for the toy encoder gradients. Only the
// forward loss is used here, never the analytic backward pass.

#ifndef OFFMASK_TESTS_FINITE_DIFFERENCE_HPP_
#define OFFMASK_TESTS_FINITE_DIFFERENCE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "offmask/encoder.hpp"
#include "offmask/random.hpp"

namespace offmask::testing {

struct CoordinateCheck {
  std::string block;
  Eigen::Index index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double relative_error = 0.0;
};

inline double relative_error(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-7});
  return std::abs(a - b) / scale;
}

/// Compares `coords_per_block` randomly chosen coordinates of every block
/// against central differences with step `h`. Embedding coordinates are drawn
/// from rows that the batch actually uses.
inline std::vector<CoordinateCheck> check_gradients(const ToyEncoderParams& params,
                                                    std::span<const TokenSequence> seqs,
                                                    std::span<const AttentionMask> masks,
                                                    std::span<const Label> labels,
                                                    std::size_t coords_per_block, double h,
                                                    std::uint64_t seed) {
  const auto analytic = loss_and_gradients(params, seqs, masks, labels).gradients;
  auto loss_at = [&](const ToyEncoderParams& p) { return mean_loss(p, seqs, masks, labels); };

  std::set<TokenId> used_rows;
  for (const auto& s : seqs) used_rows.insert(s.ids.begin(), s.ids.end());
  const std::vector<TokenId> rows(used_rows.begin(), used_rows.end());

  std::vector<std::pair<std::string, Eigen::VectorXd>> grads;
  auto g = analytic;
  g.for_each_block([&](std::string_view name, Eigen::Map<Eigen::VectorXd> b) {
    grads.emplace_back(std::string(name), b);
  });

  Rng rng(seed);
  std::vector<CoordinateCheck> out;
  std::size_t block_index = 0;
  for (const auto& [name, grad] : grads) {
    const std::size_t n = name == "bias" ? 1 : coords_per_block;
    for (std::size_t c = 0; c < n; ++c) {
      Eigen::Index index = 0;
      if (name == "embedding") {
        const auto row = rows[rng.below(rows.size())];
        const auto col = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(params.dim())));
        index = col * params.vocab_size() + row;  // column-major
      } else {
        index = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(grad.size())));
      }
      auto plus = params;
      auto minus = params;
      std::size_t k = 0;
      plus.for_each_block([&](std::string_view, Eigen::Map<Eigen::VectorXd> b) {
        if (k++ == block_index) b(index) += h;
      });
      k = 0;
      minus.for_each_block([&](std::string_view, Eigen::Map<Eigen::VectorXd> b) {
        if (k++ == block_index) b(index) -= h;
      });
      const double numeric = (loss_at(plus) - loss_at(minus)) / (2.0 * h);
      out.push_back({name, index, grad(index), numeric, relative_error(grad(index), numeric)});
    }
    ++block_index;
  }
  return out;
}

}  // namespace offmask::testing

#endif  // OFFMASK_TESTS_FINITE_DIFFERENCE_HPP_
