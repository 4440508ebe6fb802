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

#include "q2q/eval.hpp"

#include <cmath>
#include <map>

#include "q2q/errors.hpp"

namespace q2q {

EvalResult f1_positive(std::span<const int> predictions, std::span<const int> labels, std::string model_name,
                       std::string testset_name) {
  if (predictions.empty()) throw DataError("f1_positive: no predictions");
  if (predictions.size() != labels.size()) {
    throw DataError("f1_positive: " + std::to_string(predictions.size()) + " predictions for " +
                    std::to_string(labels.size()) + " labels");
  }
  EvalResult r;
  r.model_name = std::move(model_name);
  r.testset_name = std::move(testset_name);
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    int p = predictions[i];
    int y = labels[i];
    if ((p != 0 && p != 1) || (y != 0 && y != 1)) throw DataError("f1_positive: values must be 0 or 1");
    if (p == 1 && y == 1) ++r.tp;
    else if (p == 1) ++r.fp;
    else if (y == 1) ++r.fn;
    else ++r.tn;
  }
  r.degenerate = r.tp + r.fp == 0 || r.tp + r.fn == 0;
  if (r.tp + r.fp > 0) r.precision = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
  if (r.tp + r.fn > 0) r.recall = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
  if (r.precision + r.recall > 0) r.f1 = 2 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

std::vector<GapSummary> gap_report(std::span<const GapInput> rows) {
  std::vector<GapSummary> out;
  std::map<std::string, std::size_t> slot;
  std::vector<double> sums;
  for (const auto& r : rows) {
    auto [it, fresh] = slot.emplace(r.group, out.size());
    if (fresh) {
      out.push_back({r.group, 0, 0});
      sums.push_back(0);
    }
    sums[it->second] += r.msa_f1 - r.dialect_f1;
    ++out[it->second].models;
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].average_gap = sums[i] / static_cast<double>(out[i].models);
  return out;
}

std::vector<GapInput> pair_results(std::span<const EvalResult> msa, std::span<const EvalResult> dialect,
                                   const std::function<std::string(const std::string&)>& group_of) {
  std::map<std::string, double> dialect_f1;
  for (const auto& d : dialect) dialect_f1[d.model_name] = d.f1;
  std::map<std::string, bool> seen;
  std::vector<GapInput> rows;
  for (const auto& m : msa) {
    seen[m.model_name] = true;
    auto it = dialect_f1.find(m.model_name);
    if (it == dialect_f1.end()) throw DataError("model '" + m.model_name + "' has no dialect result");
    std::string group = group_of(m.model_name);
    if (!group.empty()) rows.push_back({m.model_name, group, m.f1, it->second});
  }
  for (const auto& d : dialect) {
    if (!seen.count(d.model_name)) throw DataError("model '" + d.model_name + "' has no MSA result");
  }
  return rows;
}

double round_decimals(double x, int places) {
  double scale = std::pow(10.0, places);
  double scaled = std::round(x * scale * 1e6) / 1e6;
  return std::round(scaled) / scale;
}

}  // namespace q2q
