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

#include "offmask/encoder.hpp"

#include <charconv>

#include "offmask/corpus.hpp"
#include "offmask/io.hpp"

namespace offmask {

std::string_view to_string(OptimizerKind kind) noexcept {
  return kind == OptimizerKind::Sgd ? "sgd" : "adam";
}

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "sgd") return OptimizerKind::Sgd;
  if (name == "adam") return OptimizerKind::Adam;
  throw Error(ErrorCode::UsageError, "unknown optimizer '" + std::string(name) + "'");
}

namespace {

class Optimizer {
 public:
  Optimizer(const TrainConfig& config, const ToyEncoderParams& like)
      : config_(config),
        m_(ToyEncoderParams::zeros_like(like)),
        v_(ToyEncoderParams::zeros_like(like)) {}

  void step(ToyEncoderParams& params, ToyEncoderParams& grads) {
    ++t_;
    const double lr = config_.learning_rate;
    if (config_.optimizer == OptimizerKind::Sgd) {
      zip(params, grads, m_, v_, [lr](auto p, auto g, auto, auto) { p -= lr * g; });
      return;
    }
    const double b1 = config_.adam_beta1;
    const double b2 = config_.adam_beta2;
    const double eps = config_.adam_epsilon;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    zip(params, grads, m_, v_, [=](auto p, auto g, auto m, auto v) {
      m = b1 * m + (1.0 - b1) * g;
      v = b2 * v + (1.0 - b2) * g.cwiseAbs2();
      p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
    });
  }

 private:
  // Walks the four structures block by block in lockstep.
  template <typename F>
  static void zip(ToyEncoderParams& p, ToyEncoderParams& g, ToyEncoderParams& m,
                  ToyEncoderParams& v, F&& f) {
    using Map = Eigen::Map<Eigen::VectorXd>;
    std::vector<Map> gs, ms, vs;
    g.for_each_block([&](std::string_view, Map b) { gs.push_back(b); });
    m.for_each_block([&](std::string_view, Map b) { ms.push_back(b); });
    v.for_each_block([&](std::string_view, Map b) { vs.push_back(b); });
    std::size_t i = 0;
    p.for_each_block([&](std::string_view, Map b) {
      f(b, gs[i], ms[i], vs[i]);
      ++i;
    });
  }

  TrainConfig config_;
  ToyEncoderParams m_;
  ToyEncoderParams v_;
  long t_ = 0;
};

}  // namespace

TrainResult train(ToyEncoderParams params, std::span<const TokenSequence> seqs,
                  std::span<const AttentionMask> masks, std::span<const Label> labels,
                  const TrainConfig& config) {
  if (seqs.size() != masks.size() || seqs.size() != labels.size()) {
    throw Error(ErrorCode::LengthMismatch, "sequences, masks and labels differ in length");
  }
  const auto counts = class_counts(labels);
  if (counts[0] == 0 || counts[1] == 0) {
    throw Error(ErrorCode::MissingClass, "training data needs both NOT and OFF documents");
  }
  if (config.batch_size == 0) throw Error(ErrorCode::UsageError, "batch size must be positive");

  TrainResult result;
  if (config.track_loss) result.loss_history.push_back(mean_loss(params, seqs, masks, labels));

  Optimizer optimizer(config, params);
  std::vector<std::size_t> order(seqs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(splitmix64(config.seed));
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t len = std::min(config.batch_size, order.size() - start);
      auto lg = loss_and_gradients(params, seqs, masks, labels,
                                   std::span<const std::size_t>(order).subspan(start, len));
      optimizer.step(params, lg.gradients);
    }
    if (config.track_loss) result.loss_history.push_back(mean_loss(params, seqs, masks, labels));
  }
  result.params = std::move(params);
  return result;
}

std::vector<Label> predict(const ToyEncoderParams& params, std::span<const TokenSequence> seqs,
                           std::span<const AttentionMask> masks) {
  if (seqs.size() != masks.size()) {
    throw Error(ErrorCode::LengthMismatch, "sequences and masks differ in length");
  }
  std::vector<Label> out;
  out.reserve(seqs.size());
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    out.push_back(encode_and_classify(params, seqs[i], masks[i]) >= 0.5 ? Label::OFF : Label::NOT);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Model file
//
//   offmask-toy-encoder v1
//   vocab_size <V>
//   dim <d>
//   seed <seed>
//   <block name> <rows> <cols>
//   <rows lines of cols space-separated values>
//   ... for embedding, query, key, value, classifier (d x 1), bias (1 x 1)

namespace {

constexpr std::string_view kModelMagic = "offmask-toy-encoder v1";

void append_block(std::string& out, std::string_view name, const Eigen::MatrixXd& m) {
  out += name;
  out += ' ' + std::to_string(m.rows()) + ' ' + std::to_string(m.cols()) + '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ' ';
      out += io::format_double(m(r, c));
    }
    out += '\n';
  }
}

class ModelReader {
 public:
  ModelReader(std::string_view contents, std::string_view source)
      : lines_(io::split_lines(contents)), source_(source) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::MalformedModelFile,
                std::string(source_) + ":" + std::to_string(pos_) + ": " + what);
  }

  const std::string& next_line() {
    if (pos_ >= lines_.size()) fail("unexpected end of file");
    return lines_[pos_++];
  }

  std::vector<std::string> next_fields() {
    std::vector<std::string> fields;
    for (auto& w : split_spaces(next_line())) fields.push_back(std::move(w));
    return fields;
  }

  template <typename T>
  T parse_number(std::string_view s) const {
    T value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) fail("bad number '" + std::string(s) + "'");
    return value;
  }

  template <typename T>
  T keyed(std::string_view key) {
    const auto f = next_fields();
    if (f.size() != 2 || f[0] != key) fail("expected '" + std::string(key) + " <value>'");
    return parse_number<T>(f[1]);
  }

  Eigen::MatrixXd block(std::string_view name, Eigen::Index rows, Eigen::Index cols) {
    const auto head = next_fields();
    if (head.size() != 3 || head[0] != name || parse_number<long>(head[1]) != rows ||
        parse_number<long>(head[2]) != cols) {
      fail("expected block '" + std::string(name) + " " + std::to_string(rows) + " " +
           std::to_string(cols) + "'");
    }
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto f = next_fields();
      if (static_cast<Eigen::Index>(f.size()) != cols) fail("row width mismatch in " + std::string(name));
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = parse_number<double>(f[static_cast<std::size_t>(c)]);
    }
    return m;
  }

  bool at_end() const {
    for (std::size_t i = pos_; i < lines_.size(); ++i) {
      if (!lines_[i].empty()) return false;
    }
    return true;
  }

 private:
  static std::vector<std::string> split_spaces(const std::string& line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && line[i] == ' ') ++i;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ') ++j;
      if (j > i) out.push_back(line.substr(i, j - i));
      i = j;
    }
    return out;
  }

  std::vector<std::string> lines_;
  std::string_view source_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string format_model(const ToyEncoderParams& params) {
  std::string out(kModelMagic);
  out += '\n';
  out += "vocab_size " + std::to_string(params.vocab_size()) + '\n';
  out += "dim " + std::to_string(params.dim()) + '\n';
  out += "seed " + std::to_string(params.seed) + '\n';
  append_block(out, "embedding", params.embedding);
  append_block(out, "query", params.query);
  append_block(out, "key", params.key);
  append_block(out, "value", params.value);
  append_block(out, "classifier", params.classifier);
  append_block(out, "bias", Eigen::MatrixXd::Constant(1, 1, params.bias));
  return out;
}

ToyEncoderParams parse_model(std::string_view contents, std::string_view source) {
  ModelReader in(contents, source);
  if (in.next_line() != kModelMagic) in.fail("not an offmask toy encoder file");
  const auto vocab = in.keyed<long>("vocab_size");
  const auto dim = in.keyed<long>("dim");
  if (vocab <= 0 || dim <= 0) in.fail("sizes must be positive");
  ToyEncoderParams p;
  p.seed = in.keyed<std::uint64_t>("seed");
  p.embedding = in.block("embedding", vocab, dim);
  p.query = in.block("query", dim, dim);
  p.key = in.block("key", dim, dim);
  p.value = in.block("value", dim, dim);
  p.classifier = in.block("classifier", dim, 1).col(0);
  p.bias = in.block("bias", 1, 1)(0, 0);
  if (!in.at_end()) in.fail("trailing content");
  if (!p.all_finite()) in.fail("non-finite parameter");
  return p;
}

void save_model(const ToyEncoderParams& params, const std::filesystem::path& path) {
  io::write_file_atomic(path, format_model(params));
}

ToyEncoderParams load_model(const std::filesystem::path& path) {
  return parse_model(io::read_file(path), path.string());
}

}  // namespace offmask
