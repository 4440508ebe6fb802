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

#ifndef Q2Q_REPORT_HPP_
#define Q2Q_REPORT_HPP_

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "q2q/data.hpp"
#include "q2q/embeddings.hpp"
#include "q2q/eval.hpp"
#include "q2q/model_spec.hpp"

namespace q2q {

struct TestSet {
  std::string name;
  std::vector<QuestionPair> pairs;
};

/// Either provider may be null; specs needing a missing one become error rows.
struct Providers {
  std::shared_ptr<const EmbeddingProvider> static_table;
  std::shared_ptr<const EmbeddingProvider> contextual;
};

struct MatrixRow {
  ModelSpec spec;
  std::string testset;
  std::optional<EvalResult> result;
  std::string error;  // set when result is empty
};

struct MatrixReport {
  std::vector<MatrixRow> rows;
  nlohmann::json metadata = nlohmann::json::object();
};

/// Position of a spec in the report: baseline, averaging encoder, then the
/// static-table and contextual LSTM models (trainable/random, dpad/focus).
int report_rank(const ModelSpec& spec);

/// "focus" for focus heads, "dpad_lstm" for LSTM encoders with the dpad
/// head, empty (excluded from gap averages) otherwise.
std::string gap_group(const ModelSpec& spec);

struct MatrixOptions {
  double dev_fraction = 0.1;  // held out of the training file for checkpoint selection
  std::uint64_t split_seed = 1;
};

/// Trains every spec on the training pairs and scores it on each test set.
/// Rows are spec-major in report_rank order, test sets in the given order.
/// A failing spec or test set yields error rows instead of aborting.
MatrixReport matrix_report(std::span<const ModelSpec> specs, const Providers& providers,
                           std::span<const QuestionPair> train_pairs, std::span<const TestSet> test_sets,
                           const MatrixOptions& options = {});

/// Columns model,provider,encoder,head,testset,tp,fp,tn,fn,precision,recall,f1.
std::string report_csv(const MatrixReport& report);
nlohmann::json report_json(const MatrixReport& report);

/// {"models", "msa_f1", "dialect_f1"} over models scored on both sets.
nlohmann::json plot_data(const MatrixReport& report, const std::string& msa_testset,
                         const std::string& dialect_testset);

/// Per-group average gaps (raw and at 3 decimals) between the two sets.
nlohmann::json gap_json(const MatrixReport& report, const std::string& msa_testset,
                        const std::string& dialect_testset);

}  // namespace q2q

#endif  // Q2Q_REPORT_HPP_
