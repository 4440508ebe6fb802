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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>
#include <sstream>

#include "q2q/data.hpp"
#include "q2q/errors.hpp"
#include "q2q/textproc.hpp"
#include "test_util.hpp"

using namespace q2q;

namespace {

std::vector<QuestionPair> parse(const std::string& text) {
  std::istringstream in(text);
  return read_q2q_tsv(in);
}

long format_error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const FormatError& e) {
    return e.line();
  }
  return -1;
}

std::vector<ParallelEntry> synthetic_corpus(int cities, int per_city, int non_questions) {
  std::vector<ParallelEntry> out;
  for (int c = 0; c < cities; ++c) {
    std::string city = "city" + std::to_string(100 + c);
    for (int i = 0; i < per_city; ++i) {
      std::string tag = std::to_string(i) + " " + city;
      out.push_back({city, "msa q" + tag + " ?", "dia q" + tag + " ؟"});
    }
    for (int i = 0; i < non_questions; ++i) {
      std::string tag = std::to_string(i) + " " + city;
      out.push_back({city, "msa s" + tag + " .", "dia s" + tag + " ."});
    }
  }
  return out;
}

std::multiset<std::string> as_multiset(const std::vector<QuestionPair>& pairs) {
  std::multiset<std::string> s;
  for (const auto& p : pairs) s.insert(p.question1 + "\t" + p.question2 + "\t" + std::to_string(p.label));
  return s;
}

}  // namespace

TEST_CASE("read_q2q_tsv") {
  auto pairs = parse("question1\tquestion2\tlabel\nأين تقع المدينة؟\tما هي عاصمة مصر؟\t1\nhow old\tare you\t0\n");
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].question1 == normalize("أين تقع المدينة؟"));
  CHECK(pairs[0].label == 1);
  CHECK(pairs[1].origin == "msa");
  LabelCounts c = count_labels(pairs);
  CHECK(c.positives == 1);
  CHECK(c.negatives == 1);

  CHECK(parse("question1\tquestion2\tlabel\n").empty());
  CHECK(parse("label\tquestion2\tquestion1\r\n1\tb\ta\r\n")[0].question1 == "a");
  CHECK(format_error_line("question1\tquestion2\tlabel\na\tb\t1\nc\td\t2\n") == 3);
  CHECK(format_error_line("question1\tquestion2\tlabel\na\tb\n") == 2);
  CHECK(format_error_line("question1\tlabel\na\t1\n") == 1);
  CHECK(format_error_line("question1\tquestion2\tlabel\n#$%\tb\t1\n") == 2);
  CHECK(format_error_line("") == 1);

  auto with_origin = parse("question1\tquestion2\tlabel\torigin\na\tb\t0\tdialect:Cairo\n");
  CHECK(with_origin[0].origin == "dialect:Cairo");
}

TEST_CASE("tsv write and reread is an identity") {
  Rng rng(4);
  std::vector<QuestionPair> pairs;
  const char* words[] = {"ما", "هو", "أفضل", "كتاب", "؟", "why", "42", "متى"};
  for (int i = 0; i < 300; ++i) {
    std::string a, b;
    for (int k = 0; k < 4; ++k) a += std::string(words[rng.below(8)]) + " ";
    for (int k = 0; k < 3; ++k) b += std::string(words[rng.below(8)]) + " ";
    pairs.push_back({normalize(a), normalize(b), static_cast<int>(rng.below(2)), i % 3 ? "msa" : "dialect:Rabat"});
  }
  std::ostringstream out;
  write_q2q_tsv(out, pairs, true);
  CHECK(parse(out.str()) == pairs);
  std::ostringstream plain;
  write_q2q_tsv(plain, pairs);
  CHECK(as_multiset(parse(plain.str())) == as_multiset(pairs));
}

TEST_CASE("generate_dialect_pairs") {
  auto corpus = synthetic_corpus(3, 30, 5);
  CHECK_THROWS_AS(generate_dialect_pairs(corpus, 3, 1), ConfigError);
  CHECK_THROWS_AS(generate_dialect_pairs(corpus, -2, 1), ConfigError);

  auto gen = generate_dialect_pairs(corpus, 20, 7);
  CHECK(gen.warnings.empty());
  REQUIRE(gen.pairs.size() == 60);
  std::set<std::pair<std::string, std::string>> translations;
  for (const auto& e : corpus) translations.emplace(normalize(e.msa_sentence), normalize(e.dialect_sentence));
  std::map<std::string, LabelCounts> per_city;
  std::vector<std::string> city_order;
  for (const auto& p : gen.pairs) {
    CHECK(is_question(p.question1));
    CHECK(is_question(p.question2));
    CHECK(p.origin.rfind("dialect:", 0) == 0);
    if (city_order.empty() || city_order.back() != p.origin) city_order.push_back(p.origin);
    (p.label ? per_city[p.origin].positives : per_city[p.origin].negatives)++;
    CHECK(translations.count({p.question1, p.question2}) == static_cast<std::size_t>(p.label));
    // Both sides come from the same city.
    CHECK(p.question2.find(p.origin.substr(8)) != std::string::npos);
  }
  CHECK(city_order == std::vector<std::string>{"dialect:city100", "dialect:city101", "dialect:city102"});
  for (const auto& [city, c] : per_city) {
    CHECK(c.positives == 10);
    CHECK(c.negatives == 10);
  }
  auto again = generate_dialect_pairs(corpus, 20, 7);
  CHECK(again.pairs == gen.pairs);
  CHECK(generate_dialect_pairs(corpus, 20, 8).pairs != gen.pairs);

  auto short_supply = generate_dialect_pairs(corpus, 80, 7);
  CHECK(short_supply.warnings.size() == 3);
  CHECK(short_supply.pairs.size() == 3 * 60);
  CHECK(count_labels(short_supply.pairs).positives == 90);
}

TEST_CASE("generator never pairs a question with its own translation") {
  // One city with repeated dialect renderings, so naive sampling hits translations often.
  std::vector<ParallelEntry> corpus;
  for (int i = 0; i < 12; ++i) {
    corpus.push_back({"Tunis", "msa " + std::to_string(i % 4) + " ?", "dia " + std::to_string(i % 3) + " ?"});
  }
  std::set<std::pair<std::string, std::string>> translations;
  for (const auto& e : corpus) translations.emplace(normalize(e.msa_sentence), normalize(e.dialect_sentence));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    for (const auto& p : generate_dialect_pairs(corpus, 8, seed).pairs) {
      if (p.label == 0) CHECK(translations.count({p.question1, p.question2}) == 0);
    }
  }
}

TEST_CASE("read_parallel_tsv") {
  std::istringstream in("city\tmsa\tdialect\nCairo\tما اسمك؟\tاسمك ايه؟\n");
  auto e = read_parallel_tsv(in);
  REQUIRE(e.size() == 1);
  CHECK(e[0].city == "Cairo");
  std::istringstream bad("city\tmsa\tdialect\nCairo\t\tx\n");
  CHECK_THROWS_AS(read_parallel_tsv(bad), FormatError);
}

TEST_CASE("stratified_split") {
  std::vector<QuestionPair> pairs;
  for (int i = 0; i < 100; ++i) pairs.push_back({"q" + std::to_string(i), "p", i % 2, "msa"});
  auto [train, test] = stratified_split(pairs, 0.8, 3);
  CHECK(train.size() == 80);
  CHECK(test.size() == 20);
  CHECK(count_labels(train).positives == 40);
  CHECK(count_labels(test).positives == 10);
  std::vector<QuestionPair> both = train;
  both.insert(both.end(), test.begin(), test.end());
  CHECK(as_multiset(both) == as_multiset(pairs));
  CHECK(stratified_split(pairs, 0.8, 3).first == train);

  std::vector<QuestionPair> two{{"a", "b", 0, "msa"}, {"c", "d", 1, "msa"}};
  auto [x, y] = stratified_split(two, 0.5, 1);
  REQUIRE(x.size() == 1);
  REQUIRE(y.size() == 1);
  CHECK(x[0].label != y[0].label);

  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n0 = 1 + rng.below(40), n1 = 1 + rng.below(40);
    std::vector<QuestionPair> ps;
    for (std::size_t i = 0; i < n0 + n1; ++i) ps.push_back({"q" + std::to_string(i), "p", i < n0 ? 0 : 1, "msa"});
    double f = 0.1 + 0.8 * rng.uniform();
    try {
      auto [a, b] = stratified_split(ps, f, trial);
      CHECK(a.size() == static_cast<std::size_t>(std::llround(f * static_cast<double>(ps.size()))));
      CHECK(std::abs(static_cast<double>(count_labels(a).negatives) - f * static_cast<double>(n0)) <= 1.0);
      CHECK(std::abs(static_cast<double>(count_labels(a).positives) - f * static_cast<double>(n1)) <= 1.0);
      CHECK(a.size() + b.size() == ps.size());
    } catch (const DataError&) {
      double t = std::llround(f * static_cast<double>(ps.size()));
      CHECK((t == 0 || t == static_cast<double>(ps.size())));
    }
  }
  CHECK_THROWS_AS(stratified_split(pairs, 1.0, 1), ConfigError);
  CHECK_THROWS_AS(stratified_split(pairs, 0.0, 1), ConfigError);
  CHECK_THROWS_AS(stratified_split(std::vector<QuestionPair>{two[0]}, 0.5, 1), DataError);
}
