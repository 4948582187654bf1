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

#include "offmask/scoring.hpp"

#include <charconv>
#include <cmath>
#include <map>

#include "offmask/error.hpp"
#include "offmask/io.hpp"

namespace offmask {

std::string_view to_string(FeatureMode mode) noexcept {
  return mode == FeatureMode::RawCount ? "raw" : "tfidf";
}

FeatureMode parse_feature_mode(std::string_view name) {
  if (name == "raw") return FeatureMode::RawCount;
  if (name == "tfidf") return FeatureMode::TfIdf;
  throw Error(ErrorCode::UsageError, "unknown feature mode '" + std::string(name) + "'");
}

double NBModel::likelihood(TokenId id, Label y) const {
  const int row = index_of(y);
  return (feature_mass(row, id) + 1.0) / (class_total(row) + static_cast<double>(vocab_size));
}

double NBModel::unseen_likelihood(Label y) const {
  return 1.0 / (class_total(index_of(y)) + static_cast<double>(vocab_size));
}

std::string corpus_fingerprint(std::span<const TokenSequence> docs, std::span<const Label> labels) {
  std::string buf;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    buf += d < labels.size() ? to_string(labels[d]) : "?";
    for (std::size_t k = 0; k < docs[d].n_real; ++k) {
      buf += '\t';
      buf += docs[d].tokens[k];
    }
    buf += '\n';
  }
  return io::sha256_hex(buf);
}

NBModel fit_nb(std::span<const TokenSequence> docs, std::span<const Label> labels,
               std::shared_ptr<const Vocabulary> vocab, const TfIdfConfig& config, FeatureMode mode) {
  if (docs.size() != labels.size()) {
    throw Error(ErrorCode::LengthMismatch, "documents and labels differ in length");
  }
  bool has[kNumClasses] = {false, false};
  for (Label y : labels) has[index_of(y)] = true;
  if (!has[0] || !has[1]) {
    throw Error(ErrorCode::MissingClass, std::string("training corpus has no ") +
                                             (has[0] ? "OFF" : "NOT") + " documents");
  }

  const auto n_vocab = static_cast<Eigen::Index>(vocab->size());
  NBModel model;
  model.feature_mass = NBModel::MassArray::Zero(kNumClasses, n_vocab);
  model.vocab_size = vocab->regular_size();
  model.mode = mode;
  model.seen.assign(vocab->size(), false);

  // Per-document term counts in id order; specials never carry mass.
  std::vector<std::map<TokenId, double>> counts(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const auto& seq = docs[d];
    for (std::size_t k = 0; k < seq.n_real; ++k) {
      const TokenId id = seq.ids[k];
      if (id < 0 || id >= n_vocab) {
        throw Error(ErrorCode::ShapeMismatch, "token id " + std::to_string(id) + " outside vocabulary");
      }
      if (vocab->is_special(id)) continue;
      counts[d][id] += 1.0;
      model.seen[static_cast<std::size_t>(id)] = true;
    }
  }

  Eigen::ArrayXd idf = Eigen::ArrayXd::Ones(n_vocab);
  if (mode == FeatureMode::TfIdf) {
    Eigen::ArrayXd df = Eigen::ArrayXd::Zero(n_vocab);
    for (const auto& c : counts) {
      for (const auto& [id, n] : c) df(id) += 1.0;
    }
    const double n_docs = static_cast<double>(docs.size());
    for (Eigen::Index i = 0; i < n_vocab; ++i) {
      if (df(i) == 0.0) continue;
      idf(i) = config.idf_smoothing ? std::log((1.0 + n_docs) / (1.0 + df(i))) + 1.0
                                    : std::log(n_docs / df(i)) + 1.0;
    }
  }

  for (std::size_t d = 0; d < docs.size(); ++d) {
    auto& c = counts[d];
    if (mode == FeatureMode::TfIdf) {
      double sq = 0.0;
      for (auto& [id, w] : c) {
        w *= idf(id);
        sq += w * w;
      }
      if (config.per_document_l2_normalize && sq > 0.0) {
        const double norm = std::sqrt(sq);
        for (auto& [id, w] : c) w /= norm;
      }
    }
    const int row = index_of(labels[d]);
    for (const auto& [id, w] : c) model.feature_mass(row, id) += w;
  }

  model.class_total = model.feature_mass.rowwise().sum();
  model.corpus_fingerprint = corpus_fingerprint(docs, labels);
  model.vocab = std::move(vocab);
  return model;
}

double smoothed_likelihood(const NBModel& model, std::string_view token, Label y) {
  const auto id = model.vocab->find(token);
  if (!id || model.vocab->is_special(*id)) return model.unseen_likelihood(y);
  return model.likelihood(*id, y);
}

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double offensive_score(double theta_off, double theta_not) noexcept {
  return sigmoid(std::log(theta_off) - std::log(theta_not));
}

double offensive_score(const NBModel& model, std::string_view token) {
  return offensive_score(smoothed_likelihood(model, token, Label::OFF),
                         smoothed_likelihood(model, token, Label::NOT));
}

// ---------------------------------------------------------------------------
// ScoreTable

void ScoreTable::insert(std::string token, double score) {
  if (!(score >= 0.0 && score <= 1.0)) {
    throw Error(ErrorCode::MalformedScoreFile, "score for '" + token + "' outside [0,1]");
  }
  if (Vocabulary::is_special_token(token)) {
    throw Error(ErrorCode::MalformedScoreFile, "special token '" + token + "' in score table");
  }
  if (token.empty() || token.find_first_of("\t\n\r") != std::string::npos) {
    throw Error(ErrorCode::MalformedScoreFile, "invalid token '" + token + "'");
  }
  const auto [it, inserted] = entries_.emplace(std::move(token), score);
  if (!inserted) throw Error(ErrorCode::MalformedScoreFile, "duplicate token '" + it->first + "'");
}

std::optional<double> ScoreTable::find(std::string_view token) const {
  const auto it = entries_.find(token);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::size_t ScoreTable::count_at_least(double threshold) const {
  std::size_t n = 0;
  for (const auto& [token, score] : entries_) n += score >= threshold ? 1 : 0;
  return n;
}

ScoreTable build_score_table(const NBModel& model, std::string created) {
  ScoreTable table(ScoreProvenance{model.corpus_fingerprint, model.mode, std::move(created)});
  for (std::size_t id = 0; id < model.seen.size(); ++id) {
    if (!model.seen[id]) continue;
    const auto tid = static_cast<TokenId>(id);
    table.insert(model.vocab->token(tid),
                 offensive_score(model.likelihood(tid, Label::OFF), model.likelihood(tid, Label::NOT)));
  }
  return table;
}

std::string format_score_table(const ScoreTable& table) {
  const auto& p = table.provenance();
  std::string out = "# offmask-scores v1\n";
  out += "# fingerprint " + p.corpus_fingerprint + "\n";
  out += "# mode " + std::string(to_string(p.mode)) + "\n";
  out += "# created " + p.created + "\n";
  for (const auto& [token, score] : table.entries()) {
    out += token;
    out += '\t';
    out += io::format_double(score);
    out += '\n';
  }
  return out;
}

ScoreTable parse_score_table(std::string_view contents, std::string_view source) {
  ScoreProvenance provenance;
  std::vector<std::pair<std::string, double>> rows;
  const auto lines = io::split_lines(contents);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const auto& line = lines[n];
    const std::string where = std::string(source) + ":" + std::to_string(n + 1);
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    // Header lines have no tab; WordPiece continuations ("##x") always do.
    if (tab == std::string::npos) {
      if (line.front() != '#') throw Error(ErrorCode::MalformedScoreFile, where + ": expected token<TAB>score");
      const auto space = line.find(' ', 2);
      const std::string key = line.substr(2, space == std::string::npos ? std::string::npos : space - 2);
      const std::string value = space == std::string::npos ? "" : line.substr(space + 1);
      if (key == "fingerprint") {
        provenance.corpus_fingerprint = value;
      } else if (key == "mode") {
        try {
          provenance.mode = parse_feature_mode(value);
        } catch (const Error&) {
          throw Error(ErrorCode::MalformedScoreFile, where + ": unknown mode '" + value + "'");
        }
      } else if (key == "created") {
        provenance.created = value;
      }
      continue;
    }
    const std::string token = line.substr(0, tab);
    const std::string_view number = std::string_view(line).substr(tab + 1);
    double score = 0.0;
    const auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), score);
    if (ec != std::errc() || ptr != number.data() + number.size() || number.empty()) {
      throw Error(ErrorCode::MalformedScoreFile, where + ": non-numeric score '" + std::string(number) + "'");
    }
    rows.emplace_back(token, score);
  }
  ScoreTable table(std::move(provenance));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    try {
      table.insert(std::move(rows[i].first), rows[i].second);
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedScoreFile, std::string(source) + ": " + e.what());
    }
  }
  return table;
}

void save_score_table(const ScoreTable& table, const std::filesystem::path& path) {
  io::write_file_atomic(path, format_score_table(table));
}

ScoreTable load_score_table(const std::filesystem::path& path) {
  return parse_score_table(io::read_file(path), path.string());
}

}  // namespace offmask
