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

#include <sstream>

#include "q2q/embeddings.hpp"
#include "q2q/errors.hpp"
#include "test_util.hpp"

using namespace q2q;
using q2q::testing::direction_distance;
using q2q::testing::jacobi_top_eigenvector;
using q2q::testing::random_matrix;

namespace {

EmbeddingTable table_from(const std::string& text) {
  std::istringstream in(text);
  return load_table(in);
}

long format_error_line(const std::string& text) {
  try {
    table_from(text);
  } catch (const FormatError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("load_table") {
  auto t = table_from("2 3\nfoo 1 2 3\nbar 4 5 6.5\n");
  CHECK(t.size() == 2);
  CHECK(t.dimension() == 3);
  CHECK(t.lookup("bar") == Eigen::Vector3d(4, 5, 6.5));

  CHECK(format_error_line("2 3\nfoo 1 2\nbar 1 2 3\n") == 2);
  CHECK(format_error_line("") == 1);
  CHECK(format_error_line("2 3\nfoo 1 2 3\nfoo 1 2 3\n") == 3);
  CHECK(format_error_line("3 2\na 1 2\nb 1 2\n") > 0);
  CHECK(format_error_line("1 2\na 1 2\nb 1 2\n") == 3);
  CHECK(format_error_line("1 2\na 1 x\n") == 2);
  CHECK(format_error_line("two 2\n") == 1);
}

TEST_CASE("lookup and OOV accounting") {
  auto t = table_from("1 2\nfoo 0.5 -1\n");
  CHECK(t.lookup("foo") == Eigen::Vector2d(0.5, -1));
  CHECK(t.oov_count() == 0);
  CHECK(t.lookup("nope") == Eigen::Vector2d::Zero());
  CHECK(t.lookup("nope") == t.lookup("nope"));
  CHECK(t.oov_count() == 3);
  CHECK(t.lookup_count() == 4);
}

TEST_CASE("contextual store and providers") {
  std::istringstream in(
      "{\"id\": \"q42\", \"vectors\": [[1, 2], [3, 4], [5, 6]]}\n"
      "{\"id\": \"q7\", \"vectors\": [[0, 1]]}\n");
  auto store = std::make_shared<const ContextualStore>(load_contextual(in));
  ContextualProvider ctx(store);
  std::vector<std::string> three{"a", "b", "c"};
  auto seq = provider_embed(ctx, three, "q42");
  CHECK(seq.length() == 3);
  CHECK(seq.vectors(2, 1) == 6);
  std::vector<std::string> two{"a", "b"};
  CHECK_THROWS_AS(provider_embed(ctx, two, "q42"), ConsistencyError);
  CHECK_THROWS_AS(provider_embed(ctx, two, "missing"), LookupError);

  auto table = std::make_shared<const EmbeddingTable>(table_from("2 2\nt1 1 0\nt2 0 1\n"));
  StaticProvider stat(table);
  std::vector<std::string> toks{"t1", "t2", "t3"};
  auto s = provider_embed(stat, toks, "x");
  CHECK(s.vectors.row(0) == table->lookup("t1").transpose());
  CHECK(s.vectors.row(1) == table->lookup("t2").transpose());
  CHECK(s.vectors.row(2).isZero(0.0));

  std::istringstream bad("{\"id\": \"a\", \"vectors\": [[1, 2]]}\n{\"id\": \"b\", \"vectors\": [[1, 2, 3]]}\n");
  try {
    load_contextual(bad);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream dup("{\"id\": \"a\", \"vectors\": [[1]]}\n{\"id\": \"a\", \"vectors\": [[2]]}\n");
  CHECK_THROWS_AS(load_contextual(dup), FormatError);
}

TEST_CASE("sif_weight") {
  CHECK(sif_weight(0.001, 0.001) == doctest::Approx(0.5));
  CHECK(sif_weight(0.0, 0.001) == 1.0);
  CHECK(sif_weight(0.009, 0.001) == doctest::Approx(0.1));
  double prev = 2;
  for (int i = 0; i <= 100; ++i) {
    double w = sif_weight(i / 100.0, 0.001);
    CHECK(w < prev);
    CHECK(w > 0);
    CHECK(w <= 1);
    prev = w;
  }
}

TEST_CASE("estimate_sif_weights gives rarer words larger weights") {
  std::vector<std::vector<std::string>> corpus{{"the", "cat"}, {"the", "dog"}, {"the", "the"}};
  auto w = estimate_sif_weights(corpus);
  CHECK(w.of("the") == doctest::Approx(0.001 / (0.001 + 4.0 / 6.0)));
  CHECK(w.of("cat") > w.of("the"));
  CHECK(w.of("unseen") == 1.0);
}

TEST_CASE("remove_principal_component") {
  Eigen::MatrixXd same(3, 4);
  same.rowwise() = Eigen::RowVector4d(1, -2, 0.5, 3);
  CHECK(remove_principal_component(same).cwiseAbs().maxCoeff() < 1e-12);

  Eigen::MatrixXd one(1, 3);
  one << 2, 0, -1;
  CHECK(remove_principal_component(one).cwiseAbs().maxCoeff() < 1e-12);

  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 3);
  CHECK(remove_principal_component(zero) == zero);

  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd x = random_matrix(5, 4, rng);
    Eigen::VectorXd u = principal_direction(x);
    Eigen::MatrixXd out = remove_direction(x, u);
    CHECK((out * u).cwiseAbs().maxCoeff() < 1e-8);
    Eigen::VectorXd oracle = jacobi_top_eigenvector(x.transpose() * x);
    CHECK(direction_distance(u, oracle) < 1e-8);
    Eigen::MatrixXd expected = x - (x * oracle) * oracle.transpose();
    CHECK((out - expected).cwiseAbs().maxCoeff() < 1e-8);
  }
}
