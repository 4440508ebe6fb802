// Copyright 2026 The Q2Q Authors.
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

#include "q2q/embeddings.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "q2q/errors.hpp"

namespace q2q {

namespace {

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::vector<std::string> tokens, Eigen::MatrixXd vectors)
    : tokens_(std::move(tokens)), vectors_(std::move(vectors)) {
  if (vectors_.cols() <= 0) throw FormatError("embedding dimension must be positive");
  if (static_cast<Index>(tokens_.size()) != vectors_.rows()) {
    throw FormatError("embedding table has " + std::to_string(tokens_.size()) + " tokens but " +
                      std::to_string(vectors_.rows()) + " rows");
  }
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<Index>(i)).second) {
      throw FormatError("duplicate token '" + tokens_[i] + "'");
    }
  }
}

EmbeddingTable::EmbeddingTable(const EmbeddingTable& other)
    : tokens_(other.tokens_), index_(other.index_), vectors_(other.vectors_),
      oov_(other.oov_.load()), lookups_(other.lookups_.load()) {}

EmbeddingTable& EmbeddingTable::operator=(const EmbeddingTable& other) {
  if (this != &other) {
    tokens_ = other.tokens_;
    index_ = other.index_;
    vectors_ = other.vectors_;
    oov_ = other.oov_.load();
    lookups_ = other.lookups_.load();
  }
  return *this;
}

bool EmbeddingTable::contains(std::string_view token) const {
  return index_.find(std::string(token)) != index_.end();
}

Eigen::VectorXd EmbeddingTable::lookup(std::string_view token) const {
  lookups_.fetch_add(1, std::memory_order_relaxed);
  auto it = index_.find(std::string(token));
  if (it == index_.end()) {
    oov_.fetch_add(1, std::memory_order_relaxed);
    return Eigen::VectorXd::Zero(dimension());
  }
  return vectors_.row(it->second).transpose();
}

EmbeddingTable load_table(std::istream& in) {
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) throw FormatError("empty embedding file", 1);
  ++line_no;
  auto header = split_spaces(line);
  long vocab = 0;
  long dim = 0;
  if (header.size() != 2 || !parse_number(header[0], vocab) || !parse_number(header[1], dim) || vocab < 0 ||
      dim <= 0) {
    throw FormatError("header must be '<vocab_size> <dimension>'", line_no);
  }
  std::vector<std::string> tokens;
  tokens.reserve(static_cast<std::size_t>(vocab));
  Eigen::MatrixXd vectors(vocab, dim);
  std::unordered_map<std::string, long> seen;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_spaces(line);
    if (fields.empty()) continue;
    if (static_cast<long>(tokens.size()) >= vocab) {
      throw FormatError("more rows than the declared vocabulary size " + std::to_string(vocab), line_no);
    }
    if (static_cast<long>(fields.size()) != dim + 1) {
      throw FormatError("expected " + std::to_string(dim) + " values, found " + std::to_string(fields.size() - 1),
                        line_no);
    }
    std::string token(fields[0]);
    if (!seen.emplace(token, line_no).second) throw FormatError("duplicate token '" + token + "'", line_no);
    Index row = static_cast<Index>(tokens.size());
    for (long k = 0; k < dim; ++k) {
      double v;
      if (!parse_number(fields[static_cast<std::size_t>(k + 1)], v)) {
        throw FormatError("malformed number '" + std::string(fields[static_cast<std::size_t>(k + 1)]) + "'", line_no);
      }
      vectors(row, k) = v;
    }
    tokens.push_back(std::move(token));
  }
  if (static_cast<long>(tokens.size()) != vocab) {
    throw FormatError("header declares " + std::to_string(vocab) + " rows, found " + std::to_string(tokens.size()),
                      line_no);
  }
  return EmbeddingTable(std::move(tokens), std::move(vectors));
}

EmbeddingTable load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding file " + path);
  return load_table(in);
}

ContextualStore::ContextualStore(std::map<std::string, Eigen::MatrixXd> by_id) : by_id_(std::move(by_id)) {
  for (const auto& [id, m] : by_id_) {
    if (m.rows() == 0 || m.cols() == 0) throw FormatError("contextual entry '" + id + "' is empty");
    if (dimension_ == 0) dimension_ = m.cols();
    if (m.cols() != dimension_) {
      throw FormatError("contextual entry '" + id + "' has dimension " + std::to_string(m.cols()) + ", expected " +
                        std::to_string(dimension_));
    }
  }
}

const Eigen::MatrixXd& ContextualStore::at(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) throw LookupError("sentence id '" + id + "' not found in contextual store");
  return it->second;
}

ContextualStore load_contextual(std::istream& in) {
  std::map<std::string, Eigen::MatrixXd> by_id;
  std::string line;
  long line_no = 0;
  Index dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains("vectors") ||
        !j["vectors"].is_array() || j["vectors"].empty()) {
      throw FormatError("expected {\"id\": string, \"vectors\": [[...], ...]}", line_no);
    }
    const auto& rows = j["vectors"];
    Index t = static_cast<Index>(rows.size());
    Index d = rows[0].is_array() ? static_cast<Index>(rows[0].size()) : 0;
    if (d == 0) throw FormatError("vectors must be non-empty arrays of numbers", line_no);
    if (dim == 0) dim = d;
    Eigen::MatrixXd m(t, d);
    for (Index r = 0; r < t; ++r) {
      const auto& row = rows[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Index>(row.size()) != dim) {
        throw FormatError("vector " + std::to_string(r) + " has inconsistent dimension", line_no);
      }
      for (Index c = 0; c < d; ++c) {
        const auto& v = row[static_cast<std::size_t>(c)];
        if (!v.is_number()) throw FormatError("non-numeric vector entry", line_no);
        m(r, c) = v.get<double>();
      }
    }
    std::string id = j["id"].get<std::string>();
    if (!by_id.emplace(id, std::move(m)).second) throw FormatError("duplicate id '" + id + "'", line_no);
  }
  if (by_id.empty()) throw FormatError("contextual file holds no entries");
  return ContextualStore(std::move(by_id));
}

ContextualStore load_contextual(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open contextual file " + path);
  return load_contextual(in);
}

TokenVectorSequence StaticProvider::embed(std::span<const std::string> tokens, const std::string& sentence_id) const {
  TokenVectorSequence seq{sentence_id, Eigen::MatrixXd(static_cast<Index>(tokens.size()), table_->dimension())};
  for (std::size_t t = 0; t < tokens.size(); ++t) seq.vectors.row(static_cast<Index>(t)) = table_->lookup(tokens[t]);
  return seq;
}

TokenVectorSequence ContextualProvider::embed(std::span<const std::string> tokens,
                                              const std::string& sentence_id) const {
  const Eigen::MatrixXd& stored = store_->at(sentence_id);
  if (stored.rows() != static_cast<Index>(tokens.size())) {
    throw ConsistencyError("sentence id '" + sentence_id + "' stores " + std::to_string(stored.rows()) +
                           " vectors for " + std::to_string(tokens.size()) + " tokens");
  }
  return TokenVectorSequence{sentence_id, stored};
}

double sif_weight(double p_w, double a) {
  if (!(a > 0) || !(p_w >= 0) || !(p_w <= 1)) throw ConfigError("sif_weight: need a > 0 and 0 <= p_w <= 1");
  return a / (a + p_w);
}

SifWeights estimate_sif_weights(std::span<const std::vector<std::string>> sentences, double a) {
  std::map<std::string, long> counts;
  long total = 0;
  for (const auto& s : sentences) {
    for (const auto& tok : s) {
      ++counts[tok];
      ++total;
    }
  }
  SifWeights w;
  w.smoothing_a = a;
  for (const auto& [tok, n] : counts) {
    w.weight[tok] = sif_weight(static_cast<double>(n) / static_cast<double>(total), a);
  }
  return w;
}

Eigen::VectorXd principal_direction(const Eigen::MatrixXd& rows, double tolerance, int max_iterations) {
  Index d = rows.cols();
  if (rows.rows() == 0 || rows.isZero(0.0)) return Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd gram = rows.transpose() * rows;
  Index start;
  rows.rowwise().squaredNorm().maxCoeff(&start);
  Eigen::VectorXd u = rows.row(start).transpose().normalized();
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::VectorXd next = gram * u;
    double norm = next.norm();
    if (norm == 0.0) break;
    next /= norm;
    double change = (next - u).norm();
    u = std::move(next);
    if (change < tolerance) break;
  }
  return u;
}

Eigen::MatrixXd remove_direction(const Eigen::MatrixXd& rows, const Eigen::VectorXd& u) {
  if (u.size() != rows.cols()) throw DimensionError("remove_direction: direction size does not match row width");
  return rows - (rows * u) * u.transpose();
}

Eigen::MatrixXd remove_principal_component(const Eigen::MatrixXd& rows) {
  return remove_direction(rows, principal_direction(rows));
}

}  // namespace q2q
