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

#include "q2q/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "q2q/errors.hpp"
#include "q2q/prediction.hpp"

namespace q2q {

int report_rank(const ModelSpec& s) {
  if (is_baseline(s)) return 0;
  if (s.encoder == EncoderKind::average || s.encoder == EncoderKind::sif_average) return 1;
  int base = s.provider == ProviderKind::static_table ? 10 : 20;
  int within = (s.head == HeadKind::focus ? 2 : 0) + (s.encoder == EncoderKind::rand_lstm ? 1 : 0);
  return base + within;
}

std::string gap_group(const ModelSpec& s) {
  if (s.head == HeadKind::focus) return "focus";
  if (s.encoder == EncoderKind::trainable_bilstm || s.encoder == EncoderKind::rand_lstm) return "dpad_lstm";
  return {};
}

MatrixReport matrix_report(std::span<const ModelSpec> specs_in, const Providers& providers,
                           std::span<const QuestionPair> train_pairs, std::span<const TestSet> test_sets,
                           const MatrixOptions& options) {
  std::vector<ModelSpec> specs(specs_in.begin(), specs_in.end());
  for (const auto& s : specs) validate_spec(s);
  std::stable_sort(specs.begin(), specs.end(),
                   [](const ModelSpec& a, const ModelSpec& b) { return report_rank(a) < report_rank(b); });

  MatrixReport report;
  std::vector<QuestionPair> fit(train_pairs.begin(), train_pairs.end());
  std::vector<QuestionPair> dev;
  std::string split = "none";
  try {
    auto parts = stratified_split(train_pairs, 1.0 - options.dev_fraction, options.split_seed);
    fit = std::move(parts.first);
    dev = std::move(parts.second);
    char buf[96];
    std::snprintf(buf, sizeof buf, "stratified %.3g/%.3g, seed %llu", 1.0 - options.dev_fraction,
                  options.dev_fraction, static_cast<unsigned long long>(options.split_seed));
    split = buf;
  } catch (const DataError&) {
    // Too few pairs to hold out a dev set; select the last epoch instead.
  }

  nlohmann::json tests = nlohmann::json::array();
  for (const auto& t : test_sets) tests.push_back({{"name", t.name}, {"pairs", t.pairs.size()}});
  nlohmann::json spec_meta = nlohmann::json::array();
  for (const auto& s : specs) spec_meta.push_back(to_json(resolve_defaults(s)));
  report.metadata = {{"train_pairs", fit.size()},
                     {"dev_pairs", dev.size()},
                     {"dev_split", split},
                     {"testsets", std::move(tests)},
                     {"specs", std::move(spec_meta)}};

  for (const auto& spec : specs) {
    const auto& provider =
        spec.provider == ProviderKind::static_table ? providers.static_table : providers.contextual;
    std::optional<Predictor> predictor;
    std::string failure;
    if (!provider) {
      failure = "no " + to_string(spec.provider) + " provider configured";
    } else {
      try {
        predictor.emplace(train(spec, *provider, fit, dev), provider);
      } catch (const Error& e) {
        failure = std::string("training failed: ") + e.what();
      }
    }
    for (const auto& t : test_sets) {
      MatrixRow row{spec, t.name, std::nullopt, failure};
      if (predictor) {
        try {
          std::vector<int> preds, labels;
          for (const auto& p : predictor->predict_all(t.pairs)) preds.push_back(p.label);
          for (const auto& p : t.pairs) labels.push_back(p.label);
          row.result = f1_positive(preds, labels, model_name(spec), t.name);
        } catch (const Error& e) {
          row.error = std::string("evaluation failed: ") + e.what();
        }
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

std::string report_csv(const MatrixReport& report) {
  std::string out = "model,provider,encoder,head,testset,tp,fp,tn,fn,precision,recall,f1\n";
  char buf[160];
  for (const auto& r : report.rows) {
    out += model_name(r.spec) + "," + to_string(r.spec.provider) + "," + to_string(r.spec.encoder) + "," +
           to_string(r.spec.head) + "," + r.testset + ",";
    if (r.result) {
      const EvalResult& e = *r.result;
      std::snprintf(buf, sizeof buf, "%ld,%ld,%ld,%ld,%.6f,%.6f,%.6f\n", e.tp, e.fp, e.tn, e.fn, e.precision,
                    e.recall, e.f1);
      out += buf;
    } else {
      out += "NA,NA,NA,NA,NA,NA,NA\n";
    }
  }
  return out;
}

nlohmann::json report_json(const MatrixReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    nlohmann::json j = {{"model", model_name(r.spec)}, {"testset", r.testset}, {"ok", r.result.has_value()}};
    if (r.result) {
      const EvalResult& e = *r.result;
      j.update({{"tp", e.tp},
                {"fp", e.fp},
                {"tn", e.tn},
                {"fn", e.fn},
                {"precision", e.precision},
                {"recall", e.recall},
                {"f1", e.f1},
                {"degenerate", e.degenerate}});
    } else {
      j["error"] = r.error;
    }
    rows.push_back(std::move(j));
  }
  return {{"metadata", report.metadata}, {"rows", std::move(rows)}};
}

namespace {

struct PairedModel {
  std::string name;
  ModelSpec spec;
  double msa, dialect;
};

std::vector<PairedModel> paired_models(const MatrixReport& report, const std::string& msa,
                                       const std::string& dialect, std::vector<std::string>* skipped) {
  std::vector<PairedModel> out;
  std::map<std::string, std::size_t> slot;
  std::map<std::string, std::optional<double>> m, d;
  for (const auto& r : report.rows) {
    std::string name = model_name(r.spec);
    if (slot.emplace(name, out.size()).second) out.push_back({name, r.spec, 0, 0});
    std::optional<double> f1 = r.result ? std::optional<double>(r.result->f1) : std::nullopt;
    if (r.testset == msa) m[name] = f1;
    if (r.testset == dialect) d[name] = f1;
  }
  std::vector<PairedModel> kept;
  for (auto& pm : out) {
    if (m[pm.name] && d[pm.name]) {
      pm.msa = *m[pm.name];
      pm.dialect = *d[pm.name];
      kept.push_back(pm);
    } else if (skipped) {
      skipped->push_back(pm.name);
    }
  }
  return kept;
}

}  // namespace

nlohmann::json plot_data(const MatrixReport& report, const std::string& msa_testset,
                         const std::string& dialect_testset) {
  nlohmann::json models = nlohmann::json::array(), msa = nlohmann::json::array(), dia = nlohmann::json::array();
  for (const auto& pm : paired_models(report, msa_testset, dialect_testset, nullptr)) {
    models.push_back(pm.name);
    msa.push_back(pm.msa);
    dia.push_back(pm.dialect);
  }
  return {{"models", models}, {"msa_f1", msa}, {"dialect_f1", dia}};
}

nlohmann::json gap_json(const MatrixReport& report, const std::string& msa_testset,
                        const std::string& dialect_testset) {
  std::vector<std::string> skipped;
  std::vector<GapInput> inputs;
  for (const auto& pm : paired_models(report, msa_testset, dialect_testset, &skipped)) {
    std::string group = gap_group(pm.spec);
    if (!group.empty()) inputs.push_back({pm.name, group, pm.msa, pm.dialect});
  }
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : gap_report(inputs)) {
    nlohmann::json members = nlohmann::json::array();
    for (const auto& in : inputs)
      if (in.group == g.group) members.push_back(in.model);
    groups.push_back({{"group", g.group},
                      {"average_gap", g.average_gap},
                      {"average_gap_3dp", round_decimals(g.average_gap, 3)},
                      {"models", std::move(members)}});
  }
  return {{"msa_testset", msa_testset},
          {"dialect_testset", dialect_testset},
          {"groups", std::move(groups)},
          {"skipped", skipped}};
}

}  // namespace q2q
