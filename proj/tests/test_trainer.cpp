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

#include <sstream>
#include <vector>

#include "gpl/synth.hpp"
#include "gpl/trainer.hpp"
#include "test_util.hpp"

using namespace gpl;

namespace {

struct Planted {
  SparseGraph g;
  PUSplit split;
};

Planted MakePlanted(double h, std::uint64_t seed, std::size_t n = 1000) {
  PlantedConfig c;
  c.n = n;
  c.h = h;
  c.seed = seed;
  Planted p{GeneratePlanted(c), {}};
  p.split = MakePUSplit(p.g, 0.5, seed);
  return p;
}

std::string TraceText(const TrainTrace& t) {
  std::ostringstream out;
  WriteTraceCsv(out, t);
  return out.str();
}

}  // namespace

TEST_SUITE("trainer") {

TEST_CASE("null training equals one inference pass") {
  const auto p = MakePlanted(0.5, 1, 200);
  TrainConfig cfg;
  cfg.outer_epochs = 1;
  cfg.k_inner = 0;
  cfg.lr_clf = 0.0;
  const auto r = RunGpl(p.g, p.split, cfg);
  const EdgeMask fresh(p.g.num_edges());
  CHECK(r.mask.raw() == fresh.raw());
  const auto init = ClassifierState::Init(p.g.features().cols(), cfg.hidden, cfg.seed);
  CHECK(r.classifier.params.Flatten() == init.params.Flatten());
  const Vector z = Forward(init.params, GcnOperator(p.g, fresh), p.g.features());
  CHECK(r.scores == z);
  CHECK(r.trace.size() == 1);
}

TEST_CASE("trace has one record per epoch") {
  const auto p = MakePlanted(0.5, 2, 200);
  TrainConfig cfg;
  cfg.outer_epochs = 4;
  cfg.k_inner = 5;
  const auto r = RunGpl(p.g, p.split, cfg);
  REQUIRE(r.trace.size() == 4);
  for (int e = 0; e < 4; ++e) CHECK(r.trace[e].epoch == e + 1);
  CHECK(RunBaseline(p.g, p.split, cfg).trace.size() == 4);
}

TEST_CASE("runs are deterministic per seed") {
  const auto p = MakePlanted(0.7, 3, 300);
  TrainConfig cfg;
  cfg.outer_epochs = 3;
  cfg.k_inner = 10;
  CHECK(TraceText(RunGpl(p.g, p.split, cfg).trace) == TraceText(RunGpl(p.g, p.split, cfg).trace));
  CHECK(TraceText(RunBaseline(p.g, p.split, cfg).trace) ==
        TraceText(RunBaseline(p.g, p.split, cfg).trace));
  const auto a = FirstEpochPrior(p.g, p.split, cfg);
  const auto b = FirstEpochPrior(p.g, p.split, cfg);
  CHECK(a.pi_hat == b.pi_hat);
  CHECK(a.c_star == b.c_star);
}

TEST_CASE("trace csv has a fixed header and full precision") {
  TrainTrace t(1);
  t[0].epoch = 1;
  t[0].pi_hat = 0.1;
  const auto text = TraceText(t);
  CHECK(text.rfind("epoch,lpl_loss,pi_hat,clf_loss,f1,mean_weight_homo,mean_weight_hetero\n", 0) == 0);
  CHECK(text.find("0.10000000000000001") != std::string::npos);
}

TEST_CASE("baseline on an all-positive unlabeled set predicts nothing positive") {
  const auto base = MakePlanted(0.3, 4, 200);
  const std::vector<int> all_pos(200, 1);
  const auto g = SparseGraph::Build(200, EdgePairs(base.g), base.g.features(), all_pos);
  PUSplit split;
  for (NodeId i = 0; i < 200; ++i) (i < 100 ? split.positives : split.unlabeled).push_back(i);
  split.r_p = 0.5;
  split.pi_true = 1.0;
  TrainConfig cfg;
  cfg.outer_epochs = 200;  // long enough for the classifier to separate P from U
  const auto r = RunBaseline(g, split, cfg);
  CHECK(r.trace.back().f1 <= 0.05);
  CHECK(r.trace.back().f1 <= r.trace.front().f1);
}

TEST_CASE("baseline on a homophilic planted graph") {
  const auto p = MakePlanted(0.1, 5);
  const auto r = RunBaseline(p.g, p.split, TrainConfig{});
  CHECK(r.trace.back().f1 >= 0.7);
}

TEST_CASE("warmup prior is close on a separable planted graph") {
  PlantedConfig c;
  c.h = 0.1;
  c.feature_separation = 2.0;
  c.seed = 6;
  const auto g = GeneratePlanted(c);
  const auto split = MakePUSplit(g, 0.5, 6);
  const auto est = FirstEpochPrior(g, split, TrainConfig{});
  CHECK(std::abs(est.pi_hat - split.pi_true) <= 0.15);
}

TEST_CASE("zero-weight classifier gives the degenerate unit prior") {
  const auto p = MakePlanted(0.5, 7, 200);
  const Vector z = Forward(ClassifierParams::Zero(p.g.features().cols(), kDefaultHidden),
                           GcnOperator(p.g, EdgeMask(p.g.num_edges())), p.g.features());
  std::vector<double> sp, su;
  for (NodeId i : p.split.positives) sp.push_back(z(i));
  for (NodeId i : p.split.unlabeled) su.push_back(z(i));
  CHECK(EstimatePrior(sp, su).pi_hat == 1.0);
}

TEST_CASE("learned mask favors homophilic edges at h = 0.7") {
  const auto p = MakePlanted(0.7, 8);
  const auto r = RunGpl(p.g, p.split, TrainConfig{});
  CHECK(r.trace.back().mean_weight_hetero < r.trace.back().mean_weight_homo);
}

// Paired comparison at h = 0.7. Known to fail with the current loss: see the
// README section on the end-to-end F1 result.
TEST_CASE("gpl at least matches the baseline at h = 0.7" * doctest::may_fail()) {
  const auto p = MakePlanted(0.7, 0);
  const TrainConfig cfg;
  const double gpl = RunGpl(p.g, p.split, cfg).trace.back().f1;
  const double base = RunBaseline(p.g, p.split, cfg).trace.back().f1;
  MESSAGE("gpl f1 " << gpl << ", baseline f1 " << base);
  CHECK(gpl >= base);
}

TEST_CASE("mean mask weights split by edge type") {
  const auto g = gpl::testing::Make(4, {{0, 1}, {1, 2}, {2, 3}}, {1, 1, -1, -1});
  const std::vector<double> w{0.9, 0.2, 0.7};
  const auto m = MeanMaskWeights(g, w);
  CHECK(m.homo == doctest::Approx(0.8));
  CHECK(m.hetero == doctest::Approx(0.2));
  const auto h = gpl::testing::Make(2, {{0, 1}}, {1, 1});
  CHECK(MeanMaskWeights(h, std::vector<double>{0.5}).hetero == 0.0);
}

TEST_CASE("invalid configs and splits are rejected") {
  const auto p = MakePlanted(0.5, 9, 100);
  TrainConfig cfg;
  cfg.outer_epochs = 0;
  CHECK_THROWS_AS(RunGpl(p.g, p.split, cfg), std::invalid_argument);
  cfg = {};
  cfg.alpha = 1.0;
  CHECK_THROWS_AS(RunGpl(p.g, p.split, cfg), std::invalid_argument);
  PUSplit empty = p.split;
  empty.positives.clear();
  CHECK_THROWS(RunBaseline(p.g, empty, TrainConfig{}));
}

TEST_CASE("inverse square root schedule") {
  TrainConfig cfg;
  CHECK(cfg.ClassifierRate(4) == cfg.lr_clf);
  cfg.lr_schedule = LrSchedule::kInverseSqrt;
  CHECK(cfg.ClassifierRate(4) == doctest::Approx(cfg.lr_clf / 2.0));
}

}  // TEST_SUITE
