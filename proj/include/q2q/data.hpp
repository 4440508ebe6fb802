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

#ifndef Q2Q_DATA_HPP_
#define Q2Q_DATA_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace q2q {

/// Questions are stored normalized. origin is "msa" or "dialect:<city>".
struct QuestionPair {
  std::string question1;
  std::string question2;
  int label = 0;
  std::string origin = "msa";

  bool operator==(const QuestionPair&) const = default;
};

struct ParallelEntry {
  std::string city;
  std::string msa_sentence;
  std::string dialect_sentence;
};

struct LabelCounts {
  std::size_t negatives = 0;
  std::size_t positives = 0;
  std::size_t total() const { return negatives + positives; }
};

LabelCounts count_labels(std::span<const QuestionPair> pairs);

/// Header names the columns question1, question2, label and optionally
/// origin, in any order. Throws FormatError with the offending line.
std::vector<QuestionPair> read_q2q_tsv(std::istream& in);
std::vector<QuestionPair> read_q2q_tsv(const std::string& path);

void write_q2q_tsv(std::ostream& out, std::span<const QuestionPair> pairs, bool with_origin = false);
void write_q2q_tsv(const std::string& path, std::span<const QuestionPair> pairs, bool with_origin = false);

/// Header city\tmsa\tdialect.
std::vector<ParallelEntry> read_parallel_tsv(std::istream& in);
std::vector<ParallelEntry> read_parallel_tsv(const std::string& path);

struct GeneratedPairs {
  std::vector<QuestionPair> pairs;
  std::vector<std::string> warnings;
};

/// Per city (in name order): positives are aligned translations, negatives
/// pair each MSA question with a random dialect question of the same city
/// that is not one of its translations. Each city contributes
/// per_dialect_target / 2 of each label, or fewer with a warning when
/// supply runs short. Throws ConfigError for an odd or negative target.
GeneratedPairs generate_dialect_pairs(std::span<const ParallelEntry> entries, int per_dialect_target,
                                      std::uint64_t seed);

/// Splits into (first, second) with round(fraction * N) pairs in first,
/// allotted per label by largest remainder. Throws ConfigError unless
/// 0 < fraction < 1 and DataError when either side would be empty.
std::pair<std::vector<QuestionPair>, std::vector<QuestionPair>> stratified_split(
    std::span<const QuestionPair> pairs, double fraction, std::uint64_t seed);

}  // namespace q2q

#endif  // Q2Q_DATA_HPP_
