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
#include <limits>
#include <numeric>

#include "q2q/errors.hpp"
#include "q2q/eval.hpp"
#include "q2q/prediction.hpp"

namespace q2q {

namespace {

void check_provider(const ModelSpec& spec, const EmbeddingProvider& provider) {
  bool contextual = dynamic_cast<const ContextualProvider*>(&provider) != nullptr;
  if (contextual != (spec.provider == ProviderKind::contextual_file)) {
    throw ConfigError("provider does not match spec provider '" + to_string(spec.provider) + "'");
  }
}

std::vector<int> labels_of(std::span<const QuestionPair> pairs) {
  std::vector<int> y;
  y.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (p.label != 0 && p.label != 1) throw DataError("label must be 0 or 1");
    y.push_back(p.label);
  }
  return y;
}

double dev_f1(const Q2QModel& model, const std::vector<EncodedPair>& dev, const std::vector<int>& labels) {
  std::vector<int> preds;
  preds.reserve(dev.size());
  for (const auto& p : dev) preds.push_back(model.predict(p).label);
  return f1_positive(preds, labels).f1;
}

}  // namespace

Checkpoint train(const ModelSpec& spec_in, const EmbeddingProvider& provider, std::span<const QuestionPair> train_pairs,
                 std::span<const QuestionPair> dev_pairs, const EpochCallback& on_epoch) {
  const ModelSpec spec = resolve_defaults(spec_in);
  validate_spec(spec);
  check_provider(spec, provider);
  if (train_pairs.empty()) throw DataError("training set is empty");
  const TrainConfig& cfg = spec.train;

  std::vector<EncodedPair> train_enc = encode_pairs(provider, train_pairs, cfg.max_len);
  std::vector<EncodedPair> dev_enc = encode_pairs(provider, dev_pairs, cfg.max_len);
  std::vector<int> train_y = labels_of(train_pairs);
  std::vector<int> dev_y = labels_of(dev_pairs);

  Q2QModel model(spec, provider.dimension());
  model.initialize(cfg.seed);
  if (spec.encoder == EncoderKind::sif_average) {
    std::vector<EncodedSentence> sentences;
    for (const auto& p : train_enc) {
      sentences.push_back(p.first);
      sentences.push_back(p.second);
    }
    model.fit_sif(sentences);
  }

  ParameterRefs<double> trainable;
  std::vector<AdamState<double>> adam;
  for (Parameter<double>* p : model.parameters()) {
    if (!p->trainable) continue;
    trainable.push_back(p);
    adam.push_back(AdamState<double>::for_shape(p->value.shape(), cfg.learning_rate, cfg.adam_epsilon,
                                                p->decay ? cfg.l2 : 0.0));
  }

  const std::size_t n = train_enc.size();
  const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(cfg.seed ^ stable_hash("shuffle"));

  Checkpoint best = make_checkpoint(model);
  double best_f1 = -std::numeric_limits<double>::infinity();
  int best_epoch = 0;
  nlohmann::json history = nlohmann::json::array();
  std::optional<double> final_loss;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    std::vector<double> losses(n);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(n, start + batch);
      for (Parameter<double>* p : trainable) p->zero_grad();
      for (std::size_t k = start; k < end; ++k) {
        double l = model.accumulate_gradient(train_enc[order[k]], train_y[order[k]]);
        if (!std::isfinite(l)) {
          throw Error("training diverged: non-finite loss at epoch " + std::to_string(epoch));
        }
        losses[order[k]] = l;
      }
      const double scale = 1.0 / static_cast<double>(end - start);
      for (std::size_t i = 0; i < trainable.size(); ++i) {
        trainable[i]->grad.data() *= scale;
        adam_step(trainable[i]->value, trainable[i]->grad, adam[i]);
      }
    }
    // Summed in dataset order so the reported loss does not depend on the shuffle.
    double total = std::accumulate(losses.begin(), losses.end(), 0.0);
    EpochReport rep{epoch, total / static_cast<double>(n), std::nullopt};
    if (!dev_enc.empty()) rep.dev_f1 = dev_f1(model, dev_enc, dev_y);
    final_loss = rep.loss;
    history.push_back({{"epoch", rep.epoch},
                       {"loss", rep.loss},
                       {"dev_f1", rep.dev_f1 ? nlohmann::json(*rep.dev_f1) : nlohmann::json(nullptr)}});
    if (on_epoch) on_epoch(rep);
    if (!rep.dev_f1 || *rep.dev_f1 > best_f1) {
      best = make_checkpoint(model);
      best_epoch = epoch;
      if (rep.dev_f1) best_f1 = *rep.dev_f1;
    }
  }

  for (Parameter<double>* p : model.parameters()) p->zero_grad();
  best.meta = {{"epochs_run", cfg.epochs},
               {"best_epoch", best_epoch},
               {"final_loss", final_loss ? nlohmann::json(*final_loss) : nlohmann::json(nullptr)},
               {"seed", cfg.seed},
               {"best_dev_f1", best_epoch > 0 && !dev_enc.empty() ? nlohmann::json(best_f1) : nlohmann::json(nullptr)},
               {"train_pairs", n},
               {"dev_pairs", dev_enc.size()},
               {"history", std::move(history)}};
  return best;
}

Predictor::Predictor(const Checkpoint& ck, std::shared_ptr<const EmbeddingProvider> provider)
    : model_(model_from_checkpoint(ck)), provider_(std::move(provider)) {
  if (!provider_) throw ConfigError("predictor: no embedding provider");
  check_provider(model_.spec(), *provider_);
  if (provider_->dimension() != model_.input_dim()) {
    throw ConsistencyError("provider dimension " + std::to_string(provider_->dimension()) +
                           " does not match checkpoint input dimension " + std::to_string(model_.input_dim()));
  }
}

Prediction Predictor::predict(const QuestionPair& pair) const {
  return predict_all(std::span<const QuestionPair>(&pair, 1)).front();
}

std::vector<Prediction> Predictor::predict_all(std::span<const QuestionPair> pairs) const {
  std::vector<EncodedPair> enc = encode_pairs(*provider_, pairs, model_.spec().train.max_len);
  std::vector<Prediction> out;
  out.reserve(enc.size());
  for (const auto& p : enc) out.push_back(model_.predict(p));
  return out;
}

}  // namespace q2q
