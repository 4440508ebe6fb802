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

#ifndef Q2Q_EMBEDDINGS_HPP_
#define Q2Q_EMBEDDINGS_HPP_

#include <Eigen/Dense>

#include <atomic>
#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "q2q/numerics/tensor.hpp"

namespace q2q {

/// One vector per token of a sentence, rows in token order.
struct TokenVectorSequence {
  std::string sentence_id;
  Eigen::MatrixXd vectors;  // T x dimension

  Index length() const { return vectors.rows(); }
  Index dimension() const { return vectors.cols(); }
};

/// Static word-vector store. Immutable after construction; lookups of
/// unknown tokens return zeros and bump an atomic OOV counter.
class EmbeddingTable {
 public:
  EmbeddingTable(std::vector<std::string> tokens, Eigen::MatrixXd vectors);
  EmbeddingTable(const EmbeddingTable& other);
  EmbeddingTable& operator=(const EmbeddingTable& other);

  Index dimension() const { return vectors_.cols(); }
  Index size() const { return vectors_.rows(); }
  bool contains(std::string_view token) const;
  const std::vector<std::string>& tokens() const { return tokens_; }

  Eigen::VectorXd lookup(std::string_view token) const;

  std::uint64_t oov_count() const { return oov_.load(); }
  std::uint64_t lookup_count() const { return lookups_.load(); }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, Index> index_;
  Eigen::MatrixXd vectors_;
  mutable std::atomic<std::uint64_t> oov_{0};
  mutable std::atomic<std::uint64_t> lookups_{0};
};

/// Text vector format: "<vocab_size> <dimension>" then one
/// "<token> <f1> ... <fd>" row per entry.
EmbeddingTable load_table(std::istream& in);
EmbeddingTable load_table(const std::string& path);

/// Precomputed contextual vectors keyed by sentence id, read from JSON
/// Lines of the form {"id": ..., "vectors": [[...], ...]}.
class ContextualStore {
 public:
  explicit ContextualStore(std::map<std::string, Eigen::MatrixXd> by_id);

  Index dimension() const { return dimension_; }
  std::size_t size() const { return by_id_.size(); }
  bool contains(const std::string& id) const { return by_id_.count(id) != 0; }
  /// Throws LookupError naming the id when absent.
  const Eigen::MatrixXd& at(const std::string& id) const;

 private:
  std::map<std::string, Eigen::MatrixXd> by_id_;
  Index dimension_ = 0;
};

ContextualStore load_contextual(std::istream& in);
ContextualStore load_contextual(const std::string& path);

/// Source of per-token input vectors for the encoders.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual Index dimension() const = 0;
  virtual TokenVectorSequence embed(std::span<const std::string> tokens, const std::string& sentence_id) const = 0;
};

class StaticProvider final : public EmbeddingProvider {
 public:
  explicit StaticProvider(std::shared_ptr<const EmbeddingTable> table) : table_(std::move(table)) {}
  Index dimension() const override { return table_->dimension(); }
  TokenVectorSequence embed(std::span<const std::string> tokens, const std::string& sentence_id) const override;
  const EmbeddingTable& table() const { return *table_; }

 private:
  std::shared_ptr<const EmbeddingTable> table_;
};

class ContextualProvider final : public EmbeddingProvider {
 public:
  explicit ContextualProvider(std::shared_ptr<const ContextualStore> store) : store_(std::move(store)) {}
  Index dimension() const override { return store_->dimension(); }
  /// Throws LookupError for unknown ids and ConsistencyError when the stored
  /// sequence length differs from the token count.
  TokenVectorSequence embed(std::span<const std::string> tokens, const std::string& sentence_id) const override;

 private:
  std::shared_ptr<const ContextualStore> store_;
};

inline TokenVectorSequence provider_embed(const EmbeddingProvider& provider, std::span<const std::string> tokens,
                                          const std::string& sentence_id) {
  return provider.embed(tokens, sentence_id);
}

// SIF weighting.

/// a / (a + p_w).
double sif_weight(double p_w, double a);

inline constexpr double kSifSmoothing = 1e-3;

struct SifWeights {
  double smoothing_a = kSifSmoothing;
  std::map<std::string, double> weight;

  /// Tokens never seen while counting have p(w) = 0 and weight 1.
  double of(const std::string& token) const {
    auto it = weight.find(token);
    return it == weight.end() ? 1.0 : it->second;
  }
};

/// Weights from relative token frequencies over a corpus of tokenized sentences.
SifWeights estimate_sif_weights(std::span<const std::vector<std::string>> sentences, double a = kSifSmoothing);

/// First right singular vector of the rows, by power iteration on the
/// Gram matrix. Zero vector for an all-zero input.
Eigen::VectorXd principal_direction(const Eigen::MatrixXd& rows, double tolerance = 1e-10, int max_iterations = 1000);

/// rows - (rows * u) u^T.
Eigen::MatrixXd remove_direction(const Eigen::MatrixXd& rows, const Eigen::VectorXd& u);

Eigen::MatrixXd remove_principal_component(const Eigen::MatrixXd& rows);

}  // namespace q2q

#endif  // Q2Q_EMBEDDINGS_HPP_
