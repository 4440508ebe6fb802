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

#ifndef Q2Q_EVAL_HPP_
#define Q2Q_EVAL_HPP_

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace q2q {

/// Positive-class confusion counts and metrics for one model on one test set.
struct EvalResult {
  std::string model_name;
  std::string testset_name;
  long tp = 0, fp = 0, tn = 0, fn = 0;
  double precision = 0, recall = 0, f1 = 0;
  /// Precision or recall undefined (no predicted or no actual positives);
  /// the undefined metric and f1 are reported as 0.
  bool degenerate = false;

  long total() const { return tp + fp + tn + fn; }
};

/// Throws DataError on empty input, length mismatch or labels outside {0,1}.
EvalResult f1_positive(std::span<const int> predictions, std::span<const int> labels,
                       std::string model_name = {}, std::string testset_name = {});

struct GapInput {
  std::string model;
  std::string group;
  double msa_f1 = 0;
  double dialect_f1 = 0;
};

struct GapSummary {
  std::string group;
  double average_gap = 0;  // mean of msa_f1 - dialect_f1
  std::size_t models = 0;
};

/// Mean MSA-minus-dialect F1 per group, groups in order of first appearance.
std::vector<GapSummary> gap_report(std::span<const GapInput> rows);

/// Joins per-model results of two test sets. `group_of` maps a model name
/// to its group; an empty group drops the model. Throws DataError naming
/// any model that lacks its counterpart.
std::vector<GapInput> pair_results(std::span<const EvalResult> msa, std::span<const EvalResult> dialect,
                                   const std::function<std::string(const std::string&)>& group_of);

/// Round half away from zero at `places` decimals, after snapping away
/// binary representation noise below 1e-6 of the last place.
double round_decimals(double x, int places);

}  // namespace q2q

#endif  // Q2Q_EVAL_HPP_
