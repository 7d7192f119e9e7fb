// Copyright 2026 The GPL Authors.
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

#include <doctest.h>

#include <random>

#include "gpl/graph.hpp"
#include "test_util.hpp"

using namespace gpl;
using gpl::testing::Make;

TEST_SUITE("graph") {

TEST_CASE("duplicate pairs in either orientation collapse") {
  const auto g = Make(3, {{0, 1}, {1, 0}, {1, 2}});
  CHECK(g.num_edges() == 2);
  CHECK(g.edges()[0] == Edge{0, 1});
  CHECK(g.edges()[1] == Edge{1, 2});
}

TEST_CASE("self-loop is rejected by name") {
  try {
    Make(2, {{0, 0}});
    FAIL("expected an error");
  } catch (const GraphError& e) {
    CHECK(std::string(e.what()).find("self-loop") != std::string::npos);
  }
}

TEST_CASE("out-of-range endpoint and bad feature rows are rejected") {
  CHECK_THROWS_AS(Make(2, {{0, 2}}), GraphError);
  CHECK_THROWS_AS(SparseGraph::Build(3, std::vector<std::pair<NodeId, NodeId>>{{0, 1}},
                                     Matrix::Zero(2, 1), {}),
                  GraphError);
  CHECK_THROWS_AS(Make(2, {{0, 1}}, {1, 0}), GraphError);
}

TEST_CASE("degrees of two disjoint edges") {
  const auto g = SparseGraph::Build(4, std::vector<std::pair<NodeId, NodeId>>{{0, 1}, {2, 3}},
                                    Matrix::Zero(4, 2), {});
  CHECK(g.degrees() == std::vector<std::size_t>{1, 1, 1, 1});
  CHECK(g.has_edge(1, 0));
  CHECK_FALSE(g.has_edge(1, 2));
}

TEST_CASE("heterophily ratio examples") {
  CHECK(HeterophilyRatio(Make(4, {{0, 1}, {2, 3}}, {1, 1, -1, -1})) == 0.0);
  CHECK(HeterophilyRatio(Make(2, {{0, 1}}, {1, -1})) == 1.0);
  CHECK(HeterophilyRatio(Make(4, {{0, 1}, {2, 3}, {0, 2}}, {1, 1, -1, -1})) ==
        doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_WITH_AS(HeterophilyRatio(Make(2, {}, {1, -1})), "no edges", GraphError);
}

TEST_CASE("heterophily ratio ignores a global label flip") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10; ++t) {
    const auto g = gpl::testing::RandomLabeled(rng, 15, 0.3);
    std::vector<int> flipped = g.labels();
    for (int& y : flipped) y = -y;
    const auto h = SparseGraph::Build(g.num_nodes(), EdgePairs(g), g.features(), flipped);
    CHECK(HeterophilyRatio(h) == HeterophilyRatio(g));
  }
}

TEST_CASE("mask starts at 0.95 and shares one weight per edge") {
  const EdgeMask m(3);
  for (EdgeId e = 0; e < 3; ++e) CHECK(m.weight(e) == doctest::Approx(0.95).epsilon(1e-12));
  const auto w = EdgeMask::FromRaw({-40.0, 0.0, 40.0}).weights();
  CHECK(w[0] > 0.0);
  CHECK(w[1] == 0.5);
  CHECK(w[2] <= 1.0);
}

TEST_CASE("propagation operator: scalar weight cancels on a 2-node path") {
  const auto g = Make(2, {{0, 1}});
  const std::vector<double> half{0.5};
  const Matrix p = PropagationOperator(g, half).Dense();
  Matrix want(2, 2);
  want << 0, 1, 1, 0;
  CHECK((p - want).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("propagation operator: uniform weights equal D^-1 A") {
  std::mt19937_64 rng(11);
  const auto g = gpl::testing::RandomLabeled(rng, 9, 0.4);
  const std::vector<double> w(g.num_edges(), 0.37);
  const Matrix p = PropagationOperator(g, w).Dense();
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    for (NodeId j = 0; j < g.num_nodes(); ++j) {
      const double want = g.has_edge(i, j) ? 1.0 / static_cast<double>(g.degree(i)) : 0.0;
      if (g.degree(i) == 0 && i == j) {
        CHECK(p(i, j) == 1.0);
      } else {
        CHECK(p(i, j) == doctest::Approx(want).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("propagation operator: isolated node keeps an identity row") {
  const auto g = Make(3, {{0, 1}});
  const Matrix p = PropagationOperator(g, EdgeMask(1)).Dense();
  CHECK(p(2, 2) == 1.0);
  CHECK(p.row(2).sum() == 1.0);
}

TEST_CASE("propagation operator rows are stochastic for random masks") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 50; ++t) {
    const auto g = gpl::testing::RandomLabeled(rng, 2 + t % 20, 0.25);
    const Matrix p = PropagationOperator(g, gpl::testing::RandomMask(rng, g.num_edges())).Dense();
    CHECK((p.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-10);
    CHECK(p.minCoeff() >= 0.0);
  }
}

TEST_CASE("gcn operator examples") {
  const auto single = Make(1, {});
  CHECK(GcnOperator(single, EdgeMask(0)).Dense()(0, 0) == 1.0);

  // Weight 1 in the limit: D~ = diag(2, 2), every entry 1/2.
  const auto path = Make(2, {{0, 1}});
  const std::vector<double> one{1.0};
  const Matrix s = GcnOperator(path, one).Dense();
  CHECK((s.array() - 0.5).abs().maxCoeff() <= 1e-15);
}

TEST_CASE("gcn operator is symmetric for random masks") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 30; ++t) {
    const auto g = gpl::testing::RandomLabeled(rng, 3 + t % 15, 0.3);
    const Matrix s = GcnOperator(g, gpl::testing::RandomMask(rng, g.num_edges())).Dense();
    CHECK((s - s.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("sparse apply matches the dense matrix") {
  std::mt19937_64 rng(14);
  const auto g = gpl::testing::RandomLabeled(rng, 12, 0.3);
  const SparseOperator op = PropagationOperator(g, gpl::testing::RandomMask(rng, g.num_edges()));
  const Matrix x = Matrix::Random(12, 3);
  CHECK((op.Apply(x) - op.Dense() * x).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((op.ApplyTransposed(x) - op.Dense().transpose() * x).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("rewire: current ratio is a fixed point") {
  const auto g = Make(4, {{0, 1}, {2, 3}, {0, 2}}, {1, 1, -1, -1});
  const auto r = RewireToHeterophily(g, HeterophilyRatio(g), 3);
  CHECK(r.edges() == g.edges());
}

TEST_CASE("rewire to full heterophily on a balanced 20-node graph") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i < 20; ++i) {
    for (NodeId j = i + 1; j < 20; ++j) {
      if (u(rng) < 0.2) edges.emplace_back(i, j);
    }
  }
  std::vector<int> labels(20);
  for (int i = 0; i < 20; ++i) labels[i] = i < 10 ? 1 : -1;
  const auto g = SparseGraph::Build(20, edges, Matrix::Zero(20, 1), labels);
  const auto r = RewireToHeterophily(g, 1.0, 4);
  CHECK(r.num_edges() == g.num_edges());
  CHECK(HeterophilyRatio(r) == 1.0);
  for (EdgeId e = 0; e < r.num_edges(); ++e) CHECK(r.is_heterophilic(e));
}

TEST_CASE("rewire hits the target, keeps size, and is deterministic") {
  std::mt19937_64 rng(22);
  const auto g = gpl::testing::RandomLabeled(rng, 60, 0.1);
  for (double target : {0.1, 0.35, 0.6, 0.9}) {
    const auto a = RewireToHeterophily(g, target, 7);
    const auto b = RewireToHeterophily(g, target, 7);
    CHECK(a.edges() == b.edges());
    CHECK(a.num_nodes() == g.num_nodes());
    CHECK(a.num_edges() == g.num_edges());
    CHECK(std::abs(HeterophilyRatio(a) - target) <= 0.02);
  }
}

TEST_CASE("rewire reports the achievable range when the target is unreachable") {
  // One positive among five nodes: at most 4 cross pairs exist.
  const auto g = Make(5, {{1, 2}, {2, 3}, {3, 4}, {1, 4}, {1, 3}, {0, 1}}, {1, -1, -1, -1, -1});
  try {
    RewireToHeterophily(g, 1.0, 0);
    FAIL("expected an error");
  } catch (const GraphError& e) {
    CHECK(std::string(e.what()).find("achievable") != std::string::npos);
  }
}

}  // TEST_SUITE
