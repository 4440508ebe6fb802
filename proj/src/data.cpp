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

#include "q2q/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "q2q/errors.hpp"
#include "q2q/numerics/random.hpp"
#include "q2q/textproc.hpp"

namespace q2q {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) return fields;
    start = tab + 1;
  }
}

bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

// Column positions by header name; throws when a required name is absent.
std::map<std::string, std::size_t> header_columns(const std::vector<std::string>& header,
                                                  std::initializer_list<const char*> required) {
  std::map<std::string, std::size_t> cols;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (!cols.emplace(header[i], i).second) throw FormatError("duplicate column '" + header[i] + "'", 1);
  }
  for (const char* name : required) {
    if (!cols.count(name)) throw FormatError(std::string("missing column '") + name + "'", 1);
  }
  return cols;
}

std::string normalized_field(const std::string& raw, const char* what, long line) {
  std::string text;
  try {
    text = normalize(raw);
  } catch (const EncodingError& e) {
    throw FormatError(std::string(what) + ": " + e.what(), line);
  }
  if (text.empty()) throw FormatError(std::string(what) + " is empty after normalization", line);
  return text;
}

}  // namespace

LabelCounts count_labels(std::span<const QuestionPair> pairs) {
  LabelCounts c;
  for (const auto& p : pairs) (p.label == 1 ? c.positives : c.negatives)++;
  return c;
}

std::vector<QuestionPair> read_q2q_tsv(std::istream& in) {
  std::string line;
  if (!next_line(in, line)) throw FormatError("missing header", 1);
  std::vector<std::string> header = split_tabs(line);
  auto cols = header_columns(header, {"question1", "question2", "label"});
  const std::size_t q1 = cols["question1"], q2 = cols["question2"], lab = cols["label"];
  const bool has_origin = cols.count("origin") != 0;
  const std::size_t org = has_origin ? cols["origin"] : 0;

  std::vector<QuestionPair> pairs;
  long lineno = 1;
  while (next_line(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f = split_tabs(line);
    if (f.size() != header.size()) {
      throw FormatError("expected " + std::to_string(header.size()) + " fields, found " + std::to_string(f.size()),
                        lineno);
    }
    QuestionPair p;
    if (f[lab] == "0") p.label = 0;
    else if (f[lab] == "1") p.label = 1;
    else throw FormatError("label must be 0 or 1, found '" + f[lab] + "'", lineno);
    p.question1 = normalized_field(f[q1], "question1", lineno);
    p.question2 = normalized_field(f[q2], "question2", lineno);
    if (has_origin) {
      if (f[org].empty()) throw FormatError("empty origin", lineno);
      p.origin = f[org];
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

std::vector<QuestionPair> read_q2q_tsv(const std::string& path) {
  auto in = open_input(path);
  return read_q2q_tsv(in);
}

void write_q2q_tsv(std::ostream& out, std::span<const QuestionPair> pairs, bool with_origin) {
  out << "question1\tquestion2\tlabel" << (with_origin ? "\torigin" : "") << '\n';
  for (const auto& p : pairs) {
    out << p.question1 << '\t' << p.question2 << '\t' << p.label;
    if (with_origin) out << '\t' << p.origin;
    out << '\n';
  }
  if (!out) throw DataError("write failed");
}

void write_q2q_tsv(const std::string& path, std::span<const QuestionPair> pairs, bool with_origin) {
  auto out = open_output(path);
  write_q2q_tsv(out, pairs, with_origin);
}

std::vector<ParallelEntry> read_parallel_tsv(std::istream& in) {
  std::string line;
  if (!next_line(in, line)) throw FormatError("missing header", 1);
  std::vector<std::string> header = split_tabs(line);
  auto cols = header_columns(header, {"city", "msa", "dialect"});
  std::vector<ParallelEntry> entries;
  long lineno = 1;
  while (next_line(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f = split_tabs(line);
    if (f.size() != header.size()) {
      throw FormatError("expected " + std::to_string(header.size()) + " fields, found " + std::to_string(f.size()),
                        lineno);
    }
    ParallelEntry e{f[cols["city"]], f[cols["msa"]], f[cols["dialect"]]};
    if (e.city.empty() || e.msa_sentence.empty() || e.dialect_sentence.empty()) {
      throw FormatError("empty field", lineno);
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<ParallelEntry> read_parallel_tsv(const std::string& path) {
  auto in = open_input(path);
  return read_parallel_tsv(in);
}

GeneratedPairs generate_dialect_pairs(std::span<const ParallelEntry> entries, int per_dialect_target,
                                      std::uint64_t seed) {
  if (per_dialect_target < 0 || per_dialect_target % 2 != 0) {
    throw ConfigError("per-dialect target must be a non-negative even number, got " +
                      std::to_string(per_dialect_target));
  }
  const std::size_t half = static_cast<std::size_t>(per_dialect_target / 2);

  struct Aligned {
    std::string msa, dialect;
  };
  std::set<std::pair<std::string, std::string>> translations;
  std::map<std::string, std::vector<Aligned>> by_city;
  for (const auto& e : entries) {
    Aligned a{normalize(e.msa_sentence), normalize(e.dialect_sentence)};
    translations.emplace(a.msa, a.dialect);
    if (is_question(a.msa) && is_question(a.dialect)) by_city[e.city].push_back(std::move(a));
  }

  GeneratedPairs out;
  for (auto& [city, rows] : by_city) {
    Rng rng(seed ^ stable_hash(city));
    const std::string origin = "dialect:" + city;
    std::vector<QuestionPair> pos, neg;
    for (const auto& a : rows) pos.push_back({a.msa, a.dialect, 1, origin});
    const std::size_t n = rows.size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::string& q = rows[i].msa;
      auto acceptable = [&](std::size_t j) { return !translations.count({q, rows[j].dialect}); };
      std::size_t pick = n;
      for (int attempt = 0; attempt < 64 && pick == n; ++attempt) {
        std::size_t j = static_cast<std::size_t>(rng.below(n));
        if (acceptable(j)) pick = j;
      }
      // Rejection kept failing: fall back to a scan from a random offset.
      if (pick == n) {
        std::size_t start = static_cast<std::size_t>(rng.below(n));
        for (std::size_t k = 0; k < n && pick == n; ++k) {
          if (acceptable((start + k) % n)) pick = (start + k) % n;
        }
      }
      if (pick != n) neg.push_back({q, rows[pick].dialect, 0, origin});
    }
    rng.shuffle(std::span<QuestionPair>(pos));
    rng.shuffle(std::span<QuestionPair>(neg));
    const std::size_t k = std::min({half, pos.size(), neg.size()});
    if (k < half) {
      out.warnings.push_back("city " + city + ": only " + std::to_string(k) + " pairs per label available, " +
                             std::to_string(half) + " requested");
    }
    std::vector<QuestionPair> city_pairs(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(k));
    city_pairs.insert(city_pairs.end(), neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(k));
    rng.shuffle(std::span<QuestionPair>(city_pairs));
    out.pairs.insert(out.pairs.end(), city_pairs.begin(), city_pairs.end());
  }
  return out;
}

std::pair<std::vector<QuestionPair>, std::vector<QuestionPair>> stratified_split(
    std::span<const QuestionPair> pairs, double fraction, std::uint64_t seed) {
  if (!(fraction > 0 && fraction < 1)) throw ConfigError("split fraction must lie strictly between 0 and 1");
  if (pairs.size() < 2) throw DataError("stratified_split needs at least 2 pairs");
  std::vector<std::size_t> strata[2];
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    int y = pairs[i].label;
    if (y != 0 && y != 1) throw DataError("stratified_split: label must be 0 or 1");
    strata[y].push_back(i);
  }
  const double n = static_cast<double>(pairs.size());
  const std::size_t target = static_cast<std::size_t>(std::llround(fraction * n));
  std::size_t take[2];
  double remainder[2];
  for (int y = 0; y < 2; ++y) {
    double exact = fraction * static_cast<double>(strata[y].size());
    take[y] = static_cast<std::size_t>(std::floor(exact));
    remainder[y] = exact - std::floor(exact);
  }
  std::size_t assigned = take[0] + take[1];
  // Largest remainder first; ties go to label 0.
  int order[2] = {0, 1};
  if (remainder[1] > remainder[0]) std::swap(order[0], order[1]);
  for (int y : order) {
    if (assigned < target && take[y] < strata[y].size()) {
      ++take[y];
      ++assigned;
    }
  }
  if (assigned == 0 || assigned == pairs.size()) {
    throw DataError("stratified_split: fraction " + std::to_string(fraction) + " leaves one side empty");
  }
  Rng rng(seed);
  std::vector<QuestionPair> first, second;
  for (int y = 0; y < 2; ++y) {
    rng.shuffle(std::span<std::size_t>(strata[y]));
    for (std::size_t k = 0; k < strata[y].size(); ++k) {
      (k < take[y] ? first : second).push_back(pairs[strata[y][k]]);
    }
  }
  rng.shuffle(std::span<QuestionPair>(first));
  rng.shuffle(std::span<QuestionPair>(second));
  return {std::move(first), std::move(second)};
}

}  // namespace q2q
