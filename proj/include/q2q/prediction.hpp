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

#ifndef Q2Q_PREDICTION_HPP_
#define Q2Q_PREDICTION_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "q2q/data.hpp"
#include "q2q/embeddings.hpp"
#include "q2q/encoders.hpp"
#include "q2q/interaction.hpp"
#include "q2q/model_spec.hpp"

namespace q2q {

/// [|u - v|, u * v].
Eigen::VectorXd dpad_features(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

/// sigmoid(w . x + b).
double logistic_predict(const Eigen::VectorXd& features, const Eigen::VectorXd& weights, double bias);

/// Binary cross-entropy of a logit, computed without overflow.
double bce_with_logit(double logit, int label);

/// One question as the model consumes it.
struct EncodedSentence {
  std::vector<std::string> tokens;
  Eigen::MatrixXd vectors;  // T x D
};

struct EncodedPair {
  EncodedSentence first;
  EncodedSentence second;
};

/// Tokenizes and embeds one question, keeping at most max_len tokens. The
/// normalized question text is the contextual lookup key.
EncodedSentence encode_question(const EmbeddingProvider& provider, const std::string& question, int max_len);

/// Encodes every pair; provider failures are rethrown with the pair index.
std::vector<EncodedPair> encode_pairs(const EmbeddingProvider& provider, std::span<const QuestionPair> pairs,
                                      int max_len);

struct Prediction {
  double probability = 0;
  int label = 0;
};

/// Parameters and forward/backward wiring for one ModelSpec.
class Q2QModel {
 public:
  /// Builds zero-valued parameters. Throws ConfigError on invalid specs.
  Q2QModel(const ModelSpec& spec, Index input_dim);

  /// Seeded initialization of every parameter, including the frozen
  /// random projection.
  void initialize(std::uint64_t seed);

  /// SIF statistics for the baseline: token weights and the principal
  /// direction of the weighted sentence averages. No-op for other encoders.
  void fit_sif(std::span<const EncodedSentence> sentences);

  const ModelSpec& spec() const { return spec_; }
  Index input_dim() const { return input_dim_; }
  const SifWeights& sif_weights() const { return sif_; }
  void set_sif_weights(SifWeights w) { sif_ = std::move(w); }

  ParameterRefs<double> parameters();
  std::vector<const Parameter<double>*> parameters() const;

  /// Fixed-size sentence vector (dpad head only).
  Eigen::VectorXd sentence_vector(const EncodedSentence& s) const;

  Prediction predict(const EncodedPair& pair) const;
  double loss(const EncodedPair& pair, int label) const;
  /// Adds this example's gradient to the trainable parameters; returns the loss.
  double accumulate_gradient(const EncodedPair& pair, int label);

 private:
  bool has_lstm() const;
  HiddenStateSequence<double> states(const EncodedSentence& s, BiLstmTrace<double>* trace) const;
  double dpad_forward(const EncodedPair& pair, Eigen::VectorXd* u, Eigen::VectorXd* v) const;
  Tensor<double> focus_input(const HiddenStateSequence<double>& a, const HiddenStateSequence<double>& b,
                             SimCube<double>* cube, FocusMask<double>* mask) const;

  ModelSpec spec_;
  Index input_dim_;
  LstmParams<double> fwd_, bwd_;
  Parameter<double> sif_direction_;
  SifWeights sif_;
  Parameter<double> dpad_w_, dpad_b_;
  ConvClassifierParams<double> classifier_;
};

struct NamedTensor {
  std::string name;
  Shape shape;
  std::vector<double> data;
};

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  int version = kCheckpointVersion;
  ModelSpec spec;
  Index input_dim = 0;
  std::vector<NamedTensor> params;
  SifWeights sif;
  nlohmann::json meta = nlohmann::json::object();
};

Checkpoint make_checkpoint(const Q2QModel& model, nlohmann::json meta = nlohmann::json::object());
/// Throws FormatError when a parameter is missing or mis-shaped.
Q2QModel model_from_checkpoint(const Checkpoint& ck);

nlohmann::json checkpoint_to_json(const Checkpoint& ck);
/// Throws VersionError for an unknown format version, FormatError otherwise.
Checkpoint checkpoint_from_json(const nlohmann::json& j);
void save_checkpoint(const Checkpoint& ck, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

struct EpochReport {
  int epoch = 0;
  double loss = 0;
  std::optional<double> dev_f1;  // absent when there is no dev set
};

using EpochCallback = std::function<void(const EpochReport&)>;

/// Mini-batch Adam: batch gradients are averaged, L2 applies to decayed
/// weights, data is reshuffled each epoch from the run seed. Returns the
/// parameters of the epoch with the best dev F1 (earliest on ties; the
/// last epoch without a dev set; the initial parameters for zero epochs).
Checkpoint train(const ModelSpec& spec, const EmbeddingProvider& provider, std::span<const QuestionPair> train_pairs,
                 std::span<const QuestionPair> dev_pairs, const EpochCallback& on_epoch = {});

/// Scores pairs with a read-only model, preserving input order.
class Predictor {
 public:
  Predictor(const Checkpoint& ck, std::shared_ptr<const EmbeddingProvider> provider);

  Prediction predict(const QuestionPair& pair) const;
  std::vector<Prediction> predict_all(std::span<const QuestionPair> pairs) const;
  const Q2QModel& model() const { return model_; }

 private:
  Q2QModel model_;
  std::shared_ptr<const EmbeddingProvider> provider_;
};

}  // namespace q2q

#endif  // Q2Q_PREDICTION_HPP_
