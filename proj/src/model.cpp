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

#include <cmath>

#include "q2q/errors.hpp"
#include "q2q/prediction.hpp"
#include "q2q/textproc.hpp"

namespace q2q {

namespace {

double stable_sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

Eigen::VectorXd sign_of(const Eigen::VectorXd& x) {
  return x.unaryExpr([](double d) { return d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0); });
}

}  // namespace

Eigen::VectorXd dpad_features(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (u.size() != v.size()) {
    throw DimensionError("dpad_features: sizes " + std::to_string(u.size()) + " and " + std::to_string(v.size()));
  }
  Eigen::VectorXd f(2 * u.size());
  f << (u - v).cwiseAbs(), u.cwiseProduct(v);
  return f;
}

double logistic_predict(const Eigen::VectorXd& features, const Eigen::VectorXd& weights, double bias) {
  if (features.size() != weights.size()) {
    throw DimensionError("logistic_predict: " + std::to_string(features.size()) + " features for " +
                         std::to_string(weights.size()) + " weights");
  }
  return stable_sigmoid(weights.dot(features) + bias);
}

double bce_with_logit(double logit, int label) {
  // log(1 + e^z) - y z
  double softplus = std::max(logit, 0.0) + std::log1p(std::exp(-std::abs(logit)));
  return softplus - static_cast<double>(label) * logit;
}

EncodedSentence encode_question(const EmbeddingProvider& provider, const std::string& question, int max_len) {
  NormalizedSentence ns = tokenize(question);
  if (ns.tokens.empty()) throw DataError("question is empty after normalization");
  TokenVectorSequence seq = provider_embed(provider, ns.tokens, ns.raw);
  EncodedSentence s;
  const auto keep = std::min<std::size_t>(ns.tokens.size(), static_cast<std::size_t>(max_len));
  s.tokens.assign(ns.tokens.begin(), ns.tokens.begin() + static_cast<std::ptrdiff_t>(keep));
  s.vectors = seq.vectors.topRows(static_cast<Index>(keep));
  return s;
}

std::vector<EncodedPair> encode_pairs(const EmbeddingProvider& provider, std::span<const QuestionPair> pairs,
                                      int max_len) {
  std::vector<EncodedPair> out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::string where = "pair " + std::to_string(i) + ": ";
    try {
      out.push_back({encode_question(provider, pairs[i].question1, max_len),
                     encode_question(provider, pairs[i].question2, max_len)});
    } catch (const LookupError& e) {
      throw LookupError(where + e.what());
    } catch (const ConsistencyError& e) {
      throw ConsistencyError(where + e.what());
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
  }
  return out;
}

Q2QModel::Q2QModel(const ModelSpec& spec, Index input_dim) : spec_(resolve_defaults(spec)), input_dim_(input_dim) {
  validate_spec(spec_);
  if (input_dim <= 0) throw ConfigError("model input dimension must be positive");
  Index sentence_dim = input_dim;
  switch (spec_.encoder) {
    case EncoderKind::sif_average:
      sif_direction_ = Parameter<double>("sif.direction", {input_dim}, false, false);
      break;
    case EncoderKind::average:
      break;
    case EncoderKind::trainable_bilstm:
      fwd_ = LstmParams<double>::zeros(input_dim, spec_.arch.hidden, "encoder.fwd", true);
      bwd_ = LstmParams<double>::zeros(input_dim, spec_.arch.hidden, "encoder.bwd", true);
      sentence_dim = 2 * spec_.arch.hidden;
      break;
    case EncoderKind::rand_lstm:
      fwd_ = LstmParams<double>::zeros(input_dim, spec_.arch.rand_dim, "rand_lstm.fwd", false);
      bwd_ = LstmParams<double>::zeros(input_dim, spec_.arch.rand_dim, "rand_lstm.bwd", false);
      sentence_dim = 2 * spec_.arch.rand_dim;
      break;
  }
  if (spec_.head == HeadKind::dpad) {
    dpad_w_ = Parameter<double>("dpad.w", {2 * sentence_dim}, true, true);
    dpad_b_ = Parameter<double>("dpad.b", {1}, true, false);
  } else {
    ConvClassifierConfig cfg{kSimCubeChannels, spec_.arch.conv_depth, spec_.arch.conv_fmaps, spec_.arch.fc_units};
    classifier_ = ConvClassifierParams<double>::zeros(cfg, "focus");
  }
}

bool Q2QModel::has_lstm() const {
  return spec_.encoder == EncoderKind::trainable_bilstm || spec_.encoder == EncoderKind::rand_lstm;
}

void Q2QModel::initialize(std::uint64_t seed) {
  Rng rng(seed);
  if (spec_.encoder == EncoderKind::trainable_bilstm) {
    init_lstm_trainable(fwd_, rng);
    init_lstm_trainable(bwd_, rng);
  } else if (spec_.encoder == EncoderKind::rand_lstm) {
    const Index d = spec_.arch.rand_dim;
    fwd_ = rand_lstm_init<double>(d, input_dim_, seed ^ stable_hash("rand_lstm.fwd"), "rand_lstm.fwd");
    bwd_ = rand_lstm_init<double>(d, input_dim_, seed ^ stable_hash("rand_lstm.bwd"), "rand_lstm.bwd");
  }
  if (spec_.head == HeadKind::dpad) {
    fill_fan_in(dpad_w_, dpad_w_.value.size(), rng);
    dpad_b_.value.set_zero();
  } else {
    classifier_.init(rng);
  }
}

void Q2QModel::fit_sif(std::span<const EncodedSentence> sentences) {
  if (spec_.encoder != EncoderKind::sif_average) return;
  if (sentences.empty()) throw DataError("fit_sif: no sentences");
  std::vector<std::vector<std::string>> corpus;
  corpus.reserve(sentences.size());
  for (const auto& s : sentences) corpus.push_back(s.tokens);
  sif_ = estimate_sif_weights(corpus, sif_.smoothing_a);
  sif_direction_.value.set_zero();
  Eigen::MatrixXd rows(static_cast<Index>(sentences.size()), input_dim_);
  for (std::size_t i = 0; i < sentences.size(); ++i) rows.row(static_cast<Index>(i)) = sentence_vector(sentences[i]);
  sif_direction_.value.data() = principal_direction(rows);
}

ParameterRefs<double> Q2QModel::parameters() {
  ParameterRefs<double> refs;
  if (has_lstm()) {
    for (auto* p : fwd_.parameters()) refs.push_back(p);
    for (auto* p : bwd_.parameters()) refs.push_back(p);
  }
  if (spec_.encoder == EncoderKind::sif_average) refs.push_back(&sif_direction_);
  if (spec_.head == HeadKind::dpad) {
    refs.push_back(&dpad_w_);
    refs.push_back(&dpad_b_);
  } else {
    for (auto* p : classifier_.parameters()) refs.push_back(p);
  }
  return refs;
}

std::vector<const Parameter<double>*> Q2QModel::parameters() const {
  auto refs = const_cast<Q2QModel*>(this)->parameters();
  return {refs.begin(), refs.end()};
}

HiddenStateSequence<double> Q2QModel::states(const EncodedSentence& s, BiLstmTrace<double>* trace) const {
  BiLstmTrace<double> tr = bilstm_trace(s.vectors, fwd_, bwd_);
  HiddenStateSequence<double> out = bilstm_states(tr);
  if (trace) *trace = std::move(tr);
  return out;
}

Eigen::VectorXd Q2QModel::sentence_vector(const EncodedSentence& s) const {
  if (spec_.head != HeadKind::dpad) throw ConfigError("sentence_vector: the focus head has no sentence vector");
  if (s.vectors.rows() == 0) throw DataError("sentence_vector: empty question");
  switch (spec_.encoder) {
    case EncoderKind::sif_average: {
      Eigen::VectorXd w(static_cast<Index>(s.tokens.size()));
      for (std::size_t i = 0; i < s.tokens.size(); ++i) w(static_cast<Index>(i)) = sif_.of(s.tokens[i]);
      Eigen::VectorXd v = average_encode(s.vectors, w);
      const Eigen::VectorXd& u = sif_direction_.value.data();
      v -= v.dot(u) * u;
      return v;
    }
    case EncoderKind::average:
      return average_encode(s.vectors);
    case EncoderKind::trainable_bilstm:
      return *states(s, nullptr).pooled;
    case EncoderKind::rand_lstm:
      return max_pool_states(concat_states(states(s, nullptr)));
  }
  return {};
}

double Q2QModel::dpad_forward(const EncodedPair& pair, Eigen::VectorXd* u, Eigen::VectorXd* v) const {
  *u = sentence_vector(pair.first);
  *v = sentence_vector(pair.second);
  return dpad_w_.value.data().dot(dpad_features(*u, *v)) + dpad_b_.value[0];
}

Tensor<double> Q2QModel::focus_input(const HiddenStateSequence<double>& a, const HiddenStateSequence<double>& b,
                                     SimCube<double>* cube, FocusMask<double>* mask) const {
  SimCubeOptions opts;
  opts.max_len = spec_.train.max_len;
  *cube = build_sim_cube(a, b, opts);
  *mask = focus_reweight(*cube, FocusOptions{spec_.arch.focus_selected, spec_.arch.focus_background});
  return apply_focus(*cube, *mask);
}

Prediction Q2QModel::predict(const EncodedPair& pair) const {
  if (spec_.head == HeadKind::dpad) {
    Eigen::VectorXd u, v;
    double p = stable_sigmoid(dpad_forward(pair, &u, &v));
    return {p, p >= 0.5 ? 1 : 0};
  }
  SimCube<double> cube;
  FocusMask<double> mask;
  Tensor<double> lp = classify(focus_input(states(pair.first, nullptr), states(pair.second, nullptr), &cube, &mask),
                               classifier_);
  return {std::exp(lp[1]), lp[1] > lp[0] ? 1 : 0};
}

double Q2QModel::loss(const EncodedPair& pair, int label) const {
  if (spec_.head == HeadKind::dpad) {
    Eigen::VectorXd u, v;
    return bce_with_logit(dpad_forward(pair, &u, &v), label);
  }
  SimCube<double> cube;
  FocusMask<double> mask;
  Tensor<double> lp = classify(focus_input(states(pair.first, nullptr), states(pair.second, nullptr), &cube, &mask),
                               classifier_);
  return -lp[label];
}

double Q2QModel::accumulate_gradient(const EncodedPair& pair, int label) {
  if (label != 0 && label != 1) throw DataError("label must be 0 or 1");
  const bool train_encoder = spec_.encoder == EncoderKind::trainable_bilstm;
  BiLstmTrace<double> tr1, tr2;

  if (spec_.head == HeadKind::dpad) {
    Eigen::VectorXd u, v;
    HiddenStateSequence<double> s1, s2;
    if (train_encoder) {
      s1 = states(pair.first, &tr1);
      s2 = states(pair.second, &tr2);
      u = *s1.pooled;
      v = *s2.pooled;
    } else {
      u = sentence_vector(pair.first);
      v = sentence_vector(pair.second);
    }
    Eigen::VectorXd f = dpad_features(u, v);
    double z = dpad_w_.value.data().dot(f) + dpad_b_.value[0];
    double dz = stable_sigmoid(z) - label;
    dpad_w_.grad.data() += dz * f;
    dpad_b_.grad[0] += dz;
    if (train_encoder) {
      const Index n = u.size();
      Eigen::VectorXd df = dz * dpad_w_.value.data();
      Eigen::VectorXd sgn = sign_of(u - v);
      Eigen::VectorXd dabs = df.head(n).cwiseProduct(sgn);
      Eigen::VectorXd du = dabs + df.tail(n).cwiseProduct(v);
      Eigen::VectorXd dv = -dabs + df.tail(n).cwiseProduct(u);
      const Index H = fwd_.hidden_dim;
      auto g1 = pooled_backward<double>(s1.length(), H, du);
      auto g2 = pooled_backward<double>(s2.length(), H, dv);
      bilstm_backward(fwd_, bwd_, pair.first.vectors, tr1, g1.first, g1.second);
      bilstm_backward(fwd_, bwd_, pair.second.vectors, tr2, g2.first, g2.second);
    }
    return bce_with_logit(z, label);
  }

  HiddenStateSequence<double> s1 = states(pair.first, &tr1);
  HiddenStateSequence<double> s2 = states(pair.second, &tr2);
  SimCube<double> cube;
  FocusMask<double> mask;
  ClassifierTrace<double> ctr = classify_trace(focus_input(s1, s2, &cube, &mask), classifier_);
  Tensor<double> dlp({2});
  dlp[label] = -1.0;
  Tensor<double> dfocus = classify_backward(classifier_, ctr, dlp);
  if (train_encoder) {
    Tensor<double> dcube = apply_focus_backward(cube, mask, dfocus);
    auto [g1, g2] = sim_cube_backward(s1, s2, cube, dcube);
    bilstm_backward(fwd_, bwd_, pair.first.vectors, tr1, g1.forward, g1.backward);
    bilstm_backward(fwd_, bwd_, pair.second.vectors, tr2, g2.forward, g2.backward);
  }
  return -ctr.log_probs[label];
}

}  // namespace q2q
