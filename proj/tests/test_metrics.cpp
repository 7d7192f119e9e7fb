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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "gpl/gnn.hpp"
#include "gpl/metrics.hpp"
#include "gpl/synth.hpp"
#include "gpl/validation.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace gpl;
using gpl::testing::Make;

namespace {

Matrix DenseTransfer(const SparseGraph& g, const EdgeMask& mask, const PropagationConfig& cfg) {
  return gpl::testing::DenseTransfer(g, mask.raw(), cfg.alpha, cfg.k_prop);
}

BeliefMatrix PureBeliefs(const SparseGraph& g) {
  BeliefMatrix e0(g.num_nodes(), 2);
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    if (g.labels()[i] == 1) {
      e0.row(i) << 1.0, 0.0;
    } else {
      e0.row(i) << 0.0, 1.0;
    }
  }
  return e0;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("f1 examples") {
  const std::vector<int> truth{1, 1, 1, -1, -1};
  const std::vector<NodeId> all{0, 1, 2, 3, 4};
  CHECK(F1Score(truth, truth, all) == 1.0);
  const std::vector<int> pred{1, 1, -1, 1, -1};  // TP 2, FN 1, FP 1
  CHECK(F1Score(pred, truth, all) == doctest::Approx(2.0 / 3.0));
  const std::vector<int> none(5, -1);
  CHECK(F1Score(none, truth, all) == 0.0);
  const std::vector<NodeId> sub{3, 4};
  CHECK(F1Score(pred, truth, sub) == 0.0);
  CHECK_THROWS_AS(F1Score(pred, truth, {}), std::invalid_argument);
}

TEST_CASE("f1 ignores node relabeling") {
  std::mt19937_64 rng(1);
  std::bernoulli_distribution coin(0.4);
  for (int t = 0; t < 20; ++t) {
    std::vector<int> pred(30), truth(30);
    for (int i = 0; i < 30; ++i) {
      pred[i] = coin(rng) ? 1 : -1;
      truth[i] = coin(rng) ? 1 : -1;
    }
    std::vector<NodeId> all(30);
    std::iota(all.begin(), all.end(), 0);
    std::vector<NodeId> perm = all;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> pp(30), tp(30);
    for (int i = 0; i < 30; ++i) {
      pp[perm[i]] = pred[i];
      tp[perm[i]] = truth[i];
    }
    const double f = F1Score(pred, truth, all);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    CHECK(F1Score(pp, tp, all) == doctest::Approx(f).epsilon(1e-15));
  }
}

TEST_CASE("influence examples") {
  const auto split = Make(4, {{0, 1}, {2, 3}}, {1, -1, 1, -1});
  CHECK(HeterophilyInfluence(split, EdgeMask(2), PureBeliefs(split), {0.5, 3}, 0, 3) == 0.0);

  const auto path = Make(2, {{0, 1}}, {1, -1});
  CHECK(HeterophilyInfluence(path, EdgeMask(1), PureBeliefs(path), {0.5, 1}, 0, 1) ==
        doctest::Approx(0.5).epsilon(1e-8));

  const auto three = Make(3, {{0, 1}, {1, 2}}, {1, 1, -1});
  CHECK(std::abs(HeterophilyInfluence(three, EdgeMask(2), PureBeliefs(three), {0.5, 1}, 0, 2)) <=
        1e-10);
  CHECK_THROWS_AS(HeterophilyInfluence(three, EdgeMask(2), PureBeliefs(three), {0.5, 1}, 1, 1),
                  std::invalid_argument);
}

TEST_CASE("influence equals the dense transfer matrix entry") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto g = gpl::testing::RandomLabeled(rng, 6 + t % 8, 0.35);
    const EdgeMask mask = gpl::testing::RandomMask(rng, g.num_edges());
    const PropagationConfig cfg{0.3 + 0.02 * t, 1 + t % 4};
    const Matrix tk = DenseTransfer(g, mask, cfg);
    const NodeId a = 0;
    // Pure positive target among pure negatives, so the shift at node a is
    // away from zero and its absolute value is differentiable.
    BeliefMatrix e0(g.num_nodes(), 2);
    e0.col(0).setZero();
    e0.col(1).setOnes();
    e0.row(a) << 1.0, 0.0;
    for (NodeId b = 1; b < g.num_nodes(); ++b) {
      CHECK(HeterophilyInfluence(g, mask, e0, cfg, a, b) ==
            doctest::Approx(tk(a, b)).epsilon(1e-6).scale(1e-6));
      CHECK(WalkInfluence(g, mask, cfg, a, b) == doctest::Approx(tk(a, b)).epsilon(1e-12));
    }
  }
}

TEST_CASE("theorem 2 on a star") {
  const auto g = Make(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}, {1, -1, 1, -1, -1});
  const auto r = CheckTheorem2(g, EdgeMask(4), PureBeliefs(g), {0.5, 2}, 0);
  CHECK(r.residual <= 1e-6);
  CHECK(r.passed);
  CHECK(r.delta > 0.0);
  // Independent check of the delta itself.
  const Matrix tk = DenseTransfer(g, EdgeMask(4), {0.5, 2});
  CHECK(r.delta == doctest::Approx(tk(0, 1) + tk(0, 3) + tk(0, 4)).epsilon(1e-12));
}

TEST_CASE("theorem 2 on a disconnected node") {
  const auto g = Make(3, {{1, 2}}, {1, -1, -1});
  const auto r = CheckTheorem2(g, EdgeMask(1), PureBeliefs(g), {0.5, 3}, 0);
  CHECK(r.sum_hi == 0.0);
  CHECK(r.delta == 0.0);
  CHECK(r.passed);
}

TEST_CASE("theorem 2 on random ten-node graphs") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(50 + seed);
    const auto g = gpl::testing::RandomLabeled(rng, 10, 0.3);
    const auto r = CheckTheorem2(g, gpl::testing::RandomMask(rng, g.num_edges()), PureBeliefs(g),
                                 {0.5, 1 + static_cast<int>(seed % 4)}, 0);
    CHECK(r.residual <= 1e-6);
    CHECK(r.walk_residual <= 1e-6);
  }
}

TEST_CASE("theorem 2 requires a pure positive target") {
  const auto g = Make(2, {{0, 1}}, {-1, 1});
  CHECK_THROWS_AS(CheckTheorem2(g, EdgeMask(1), PureBeliefs(g), {0.5, 1}, 0), std::invalid_argument);
}

TEST_CASE("broken renormalization is caught by the walk oracle") {
  std::mt19937_64 rng(9);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const auto g = gpl::testing::RandomLabeled(rng, 10, 0.35);
    const auto r = CheckTheorem2(g, gpl::testing::RandomMask(rng, g.num_edges()), PureBeliefs(g),
                                 {0.5, 3}, 0, PropagateWithoutRenormalization);
    worst = std::max(worst, r.walk_residual);
  }
  CHECK(worst > 1e-6);
}

TEST_CASE("dpn distance examples") {
  const auto homo = Make(2, {{0, 1}}, {1, 1});
  CHECK(DpnDistance(Matrix::Random(2, 3), homo, EdgeMask(1)) == 0.0);

  const auto g = Make(2, {{0, 1}}, {1, -1});
  Matrix x(2, 1);
  x << 1.0, 0.0;
  const std::vector<double> raw{0.0};  // weight 0.5
  CHECK(DpnDistance(x, g, EdgeMask::FromRaw(raw)) == doctest::Approx(0.25));
  CHECK(DpnDistance(Matrix::Constant(2, 4, 1.5), g, EdgeMask(1)) == 0.0);
}

TEST_CASE("theorem 4 holds on random instances") {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 100; ++t) {
    const auto g = gpl::testing::RandomLabeled(rng, 5 + t % 26, 0.2);
    Matrix x(g.num_nodes(), 1 + t % 5);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
    const auto r = CheckTheorem4(g, gpl::testing::RandomMask(rng, g.num_edges()), x);
    CHECK(r.passed);
  }
  const auto g = gpl::testing::RandomLabeled(rng, 12, 0.3);
  const auto c = CheckTheorem4(g, EdgeMask(g.num_edges()), Matrix::Constant(12, 2, 0.3));
  CHECK(c.before == 0.0);
  CHECK(c.after <= 1e-24);  // row averages of a constant pick up round-off
}

TEST_CASE("irreducibility diagnostic") {
  const std::vector<double> s{0.1, 0.7, 0.3, 0.5};
  CHECK(IrreducibilityDiagnostic(s, 0.0) == 0.7);
  CHECK(IrreducibilityDiagnostic(s, 0.5) == 0.3);
  CHECK_THROWS_AS(IrreducibilityDiagnostic({}, 0.0), std::invalid_argument);
}

namespace {

// Oracle posterior: Bayes rule on the one-step aggregated first coordinate
// with class-conditional Gaussians fitted on the true labels.
double OracleDiagnostic(double h) {
  PlantedConfig c;
  c.n = 600;
  c.h = h;
  c.feature_separation = 3.0;
  c.seed = 4;
  const auto g = GeneratePlanted(c);
  const Vector agg = GcnOperator(g, EdgeMask(g.num_edges())).Apply(g.features()).col(0);
  double mean[2] = {0, 0}, var[2] = {0, 0}, count[2] = {0, 0};
  for (NodeId i = 0; i < c.n; ++i) {
    const int k = g.labels()[i] == 1 ? 0 : 1;
    mean[k] += agg(i);
    ++count[k];
  }
  for (int k = 0; k < 2; ++k) mean[k] /= count[k];
  for (NodeId i = 0; i < c.n; ++i) {
    const int k = g.labels()[i] == 1 ? 0 : 1;
    var[k] += (agg(i) - mean[k]) * (agg(i) - mean[k]) / count[k];
  }
  std::vector<double> post(c.n);
  for (NodeId i = 0; i < c.n; ++i) {
    double like[2];
    for (int k = 0; k < 2; ++k) {
      like[k] = count[k] * std::exp(-(agg(i) - mean[k]) * (agg(i) - mean[k]) / (2 * var[k])) /
                std::sqrt(var[k]);
    }
    post[i] = like[0] / (like[0] + like[1]);
  }
  return IrreducibilityDiagnostic(post);
}

}  // namespace

TEST_CASE("irreducibility holds on a homophilic planted graph") {
  CHECK(OracleDiagnostic(0.0) >= 0.99);
}

TEST_CASE("irreducibility breaks when the classes mix") {
  CHECK(OracleDiagnostic(0.5) < OracleDiagnostic(0.0) - 0.1);
}

// With two blocks, h = 0.9 flips the aggregated features instead of mixing
// them, so the oracle posterior stays at 1. Kept as written; see README.
TEST_CASE("irreducibility drops at h = 0.9" * doctest::may_fail()) {
  const double homo = OracleDiagnostic(0.0);
  const double hetero = OracleDiagnostic(0.9);
  MESSAGE("diagnostic h=0 " << homo << ", h=0.9 " << hetero);
  CHECK(hetero < homo - 1e-3);
}

}  // TEST_SUITE
