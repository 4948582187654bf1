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

// Single-layer, single-head attention encoder with a logistic head:
//
//   X = E[ids]            (L x d, padding rows included)
//   Q = X_r Wq            (n_real x d; padding queries are never pooled)
//   K = X Wk, V = X Wv    (L x d)
//   A = softmax(Q K^T / sqrt(d) - 10000 (1 - mask))
//   p = sigmoid(w . mean_rows(A V) + b)
//
// Forward and backward are templated on the scalar type; training and the
// model file live in encoder.cpp for double.

#ifndef OFFMASK_ENCODER_HPP_
#define OFFMASK_ENCODER_HPP_

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <span>
#include <string_view>
#include <vector>

#include "offmask/attention.hpp"
#include "offmask/labels.hpp"
#include "offmask/masking.hpp"
#include "offmask/random.hpp"
#include "offmask/tokenizer.hpp"

namespace offmask {

template <typename Scalar>
struct EncoderParams {
  using Matrix = MatrixX<Scalar>;
  using Vector = VectorX<Scalar>;

  Matrix embedding;  // |vocab| x d
  Matrix query;      // d x d
  Matrix key;        // d x d
  Matrix value;      // d x d
  Vector classifier; // d
  Scalar bias = Scalar(0);
  std::uint64_t seed = 0;

  Eigen::Index dim() const noexcept { return query.rows(); }
  Eigen::Index vocab_size() const noexcept { return embedding.rows(); }

  /// Embeddings and projections uniform in [-0.1, 0.1] from a counter-based
  /// stream, so every entry depends only on (seed, block, index).
  static EncoderParams initialize(Eigen::Index vocab_size, Eigen::Index dim, std::uint64_t seed) {
    EncoderParams p;
    p.seed = seed;
    std::uint64_t block = 0;
    auto fill = [&](Matrix& m, Eigen::Index rows, Eigen::Index cols) {
      m.resize(rows, cols);
      const std::uint64_t stream = splitmix64(seed + splitmix64(++block));
      for (Eigen::Index i = 0; i < m.size(); ++i) {
        m.data()[i] = Scalar(0.2 * counter_uniform(stream, static_cast<std::uint64_t>(i)) - 0.1);
      }
    };
    fill(p.embedding, vocab_size, dim);
    fill(p.query, dim, dim);
    fill(p.key, dim, dim);
    fill(p.value, dim, dim);
    Matrix w;
    fill(w, dim, 1);
    p.classifier = w.col(0);
    p.bias = Scalar(0);
    return p;
  }

  static EncoderParams zeros_like(const EncoderParams& other) {
    EncoderParams p;
    p.seed = other.seed;
    p.embedding = Matrix::Zero(other.embedding.rows(), other.embedding.cols());
    p.query = Matrix::Zero(other.query.rows(), other.query.cols());
    p.key = Matrix::Zero(other.key.rows(), other.key.cols());
    p.value = Matrix::Zero(other.value.rows(), other.value.cols());
    p.classifier = Vector::Zero(other.classifier.size());
    p.bias = Scalar(0);
    return p;
  }

  /// Visits every parameter block as a flat vector: f(name, Map<Vector>).
  template <typename F>
  void for_each_block(F&& f) {
    f(std::string_view("embedding"), Eigen::Map<Vector>(embedding.data(), embedding.size()));
    f(std::string_view("query"), Eigen::Map<Vector>(query.data(), query.size()));
    f(std::string_view("key"), Eigen::Map<Vector>(key.data(), key.size()));
    f(std::string_view("value"), Eigen::Map<Vector>(value.data(), value.size()));
    f(std::string_view("classifier"), Eigen::Map<Vector>(classifier.data(), classifier.size()));
    f(std::string_view("bias"), Eigen::Map<Vector>(&bias, 1));
  }

  bool all_finite() const {
    return embedding.allFinite() && query.allFinite() && key.allFinite() && value.allFinite() &&
           classifier.allFinite() && std::isfinite(static_cast<double>(bias));
  }

  friend bool operator==(const EncoderParams& a, const EncoderParams& b) {
    auto same = [](const auto& x, const auto& y) {
      return x.rows() == y.rows() && x.cols() == y.cols() && x == y;
    };
    return a.seed == b.seed && a.bias == b.bias && same(a.embedding, b.embedding) &&
           same(a.query, b.query) && same(a.key, b.key) && same(a.value, b.value) &&
           same(a.classifier, b.classifier);
  }
};

using ToyEncoderParams = EncoderParams<double>;

namespace detail {

template <typename Scalar>
struct ForwardCache {
  MatrixX<Scalar> x;        // L x d
  MatrixX<Scalar> q, k, v;  // n x d, L x d, L x d
  MatrixX<Scalar> probs;    // n x L
  VectorX<Scalar> pooled;   // d
  Scalar logit = Scalar(0);
};

template <typename Scalar>
void check_inputs(const EncoderParams<Scalar>& params, const TokenSequence& seq,
                  const AttentionMask& mask) {
  if (mask.size() != static_cast<Eigen::Index>(seq.size())) {
    throw Error(ErrorCode::ShapeMismatch, "mask length differs from sequence length");
  }
  if (seq.n_real == 0 || seq.n_real > seq.size()) {
    throw Error(ErrorCode::ShapeMismatch, "sequence has no real positions");
  }
  for (TokenId id : seq.ids) {
    if (id < 0 || id >= params.vocab_size()) {
      throw Error(ErrorCode::ShapeMismatch, "token id " + std::to_string(id) + " outside embedding table");
    }
  }
}

template <typename Scalar>
ForwardCache<Scalar> forward(const EncoderParams<Scalar>& params, const TokenSequence& seq,
                             const AttentionMask& mask) {
  check_inputs(params, seq, mask);
  const auto len = static_cast<Eigen::Index>(seq.size());
  const auto n = static_cast<Eigen::Index>(seq.n_real);
  ForwardCache<Scalar> c;
  c.x.resize(len, params.dim());
  for (Eigen::Index i = 0; i < len; ++i) c.x.row(i) = params.embedding.row(seq.ids[static_cast<std::size_t>(i)]);
  c.q = c.x.topRows(n) * params.query;
  c.k = c.x * params.key;
  c.v = c.x * params.value;
  const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(params.dim()));
  c.probs = attention_probabilities((c.q * c.k.transpose() * scale).eval(), mask.values);
  c.pooled = (c.probs * c.v).colwise().mean().transpose();
  c.logit = params.classifier.dot(c.pooled) + params.bias;
  return c;
}

/// log(1 + e^z) without overflow.
template <typename Scalar>
Scalar softplus(Scalar z) {
  using std::abs;
  using std::exp;
  using std::log1p;
  return (z > Scalar(0) ? z : Scalar(0)) + log1p(exp(-abs(z)));
}

}  // namespace detail

/// Probability of OFF for one sequence under `mask`.
template <typename Scalar>
Scalar encode_and_classify(const EncoderParams<Scalar>& params, const TokenSequence& seq,
                           const AttentionMask& mask) {
  const auto c = detail::forward(params, seq, mask);
  return Scalar(1) / (Scalar(1) + std::exp(-c.logit));
}

template <typename Scalar>
struct LossAndGradients {
  Scalar loss = Scalar(0);
  EncoderParams<Scalar> gradients;
};

/// Mean binary cross-entropy over the selected examples, and its exact
/// gradient with respect to every parameter block.
template <typename Scalar>
LossAndGradients<Scalar> loss_and_gradients(const EncoderParams<Scalar>& params,
                                            std::span<const TokenSequence> seqs,
                                            std::span<const AttentionMask> masks,
                                            std::span<const Label> labels,
                                            std::span<const std::size_t> batch) {
  if (seqs.size() != masks.size() || seqs.size() != labels.size()) {
    throw Error(ErrorCode::LengthMismatch, "sequences, masks and labels differ in length");
  }
  if (batch.empty()) throw Error(ErrorCode::EmptyInput, "empty batch");

  LossAndGradients<Scalar> out{Scalar(0), EncoderParams<Scalar>::zeros_like(params)};
  auto& g = out.gradients;
  const Scalar inv_batch = Scalar(1) / static_cast<Scalar>(batch.size());
  const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(params.dim()));

  for (std::size_t idx : batch) {
    const auto& seq = seqs[idx];
    const auto c = detail::forward(params, seq, masks[idx]);
    const Scalar y = labels[idx] == Label::OFF ? Scalar(1) : Scalar(0);
    out.loss += (detail::softplus(c.logit) - y * c.logit) * inv_batch;

    const Scalar p = Scalar(1) / (Scalar(1) + std::exp(-c.logit));
    const Scalar dz = (p - y) * inv_batch;
    g.classifier += dz * c.pooled;
    g.bias += dz;

    const auto n = c.q.rows();
    // Mean pooling spreads the pooled gradient evenly over the query rows.
    const VectorX<Scalar> d_row = dz * params.classifier / static_cast<Scalar>(n);
    const MatrixX<Scalar> d_out = VectorX<Scalar>::Ones(n) * d_row.transpose();  // n x d
    const MatrixX<Scalar> d_probs = d_out * c.v.transpose();                     // n x L
    const MatrixX<Scalar> d_v = c.probs.transpose() * d_out;                     // L x d
    const VectorX<Scalar> inner = (d_probs.array() * c.probs.array()).rowwise().sum();
    const MatrixX<Scalar> d_scores =
        (c.probs.array() * (d_probs.array().colwise() - inner.array())).matrix() * scale;
    const MatrixX<Scalar> d_q = d_scores * c.k;              // n x d
    const MatrixX<Scalar> d_k = d_scores.transpose() * c.q;  // L x d

    g.query.noalias() += c.x.topRows(n).transpose() * d_q;
    g.key.noalias() += c.x.transpose() * d_k;
    g.value.noalias() += c.x.transpose() * d_v;

    MatrixX<Scalar> d_x = d_k * params.key.transpose() + d_v * params.value.transpose();
    d_x.topRows(n) += d_q * params.query.transpose();
    for (Eigen::Index i = 0; i < d_x.rows(); ++i) {
      g.embedding.row(seq.ids[static_cast<std::size_t>(i)]) += d_x.row(i);
    }
  }
  return out;
}

template <typename Scalar>
LossAndGradients<Scalar> loss_and_gradients(const EncoderParams<Scalar>& params,
                                            std::span<const TokenSequence> seqs,
                                            std::span<const AttentionMask> masks,
                                            std::span<const Label> labels) {
  std::vector<std::size_t> all(seqs.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return loss_and_gradients(params, seqs, masks, labels, std::span<const std::size_t>(all));
}

/// Mean BCE without gradients.
template <typename Scalar>
Scalar mean_loss(const EncoderParams<Scalar>& params, std::span<const TokenSequence> seqs,
                 std::span<const AttentionMask> masks, std::span<const Label> labels) {
  if (seqs.empty()) throw Error(ErrorCode::EmptyInput, "empty corpus");
  Scalar total = Scalar(0);
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    const auto c = detail::forward(params, seqs[i], masks[i]);
    const Scalar y = labels[i] == Label::OFF ? Scalar(1) : Scalar(0);
    total += detail::softplus(c.logit) - y * c.logit;
  }
  return total / static_cast<Scalar>(seqs.size());
}

// ---------------------------------------------------------------------------
// Training (double precision)

enum class OptimizerKind { Sgd, Adam };

std::string_view to_string(OptimizerKind kind) noexcept;
OptimizerKind parse_optimizer(std::string_view name);

struct TrainConfig {
  int epochs = 30;
  double learning_rate = 0.01;
  std::size_t batch_size = 64;
  OptimizerKind optimizer = OptimizerKind::Adam;
  /// Drives the per-epoch shuffle only; initialization has its own seed.
  std::uint64_t seed = 1;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  /// Record the full-corpus loss before training and after every epoch.
  bool track_loss = false;
};

struct TrainResult {
  ToyEncoderParams params;
  /// loss_history[0] is the initial loss; one entry per epoch follows.
  std::vector<double> loss_history;
};

/// Mini-batch training; deterministic given the config. Throws MissingClass
/// unless both labels occur.
TrainResult train(ToyEncoderParams params, std::span<const TokenSequence> seqs,
                  std::span<const AttentionMask> masks, std::span<const Label> labels,
                  const TrainConfig& config);

/// OFF when p >= 0.5.
std::vector<Label> predict(const ToyEncoderParams& params, std::span<const TokenSequence> seqs,
                           std::span<const AttentionMask> masks);

/// Text dump of every block at 17 significant digits (see README for the
/// layout). Round-trips bit-exactly.
std::string format_model(const ToyEncoderParams& params);
ToyEncoderParams parse_model(std::string_view contents, std::string_view source = "<memory>");
void save_model(const ToyEncoderParams& params, const std::filesystem::path& path);
ToyEncoderParams load_model(const std::filesystem::path& path);

}  // namespace offmask

#endif  // OFFMASK_ENCODER_HPP_
