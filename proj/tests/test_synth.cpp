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

#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <unistd.h>

#include "gpl/synth.hpp"
#include "test_util.hpp"

using namespace gpl;
namespace fs = std::filesystem;

namespace {

fs::path TempDir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("gpl_test_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::size_t CountPositive(const SparseGraph& g) {
  return static_cast<std::size_t>(std::count(g.labels().begin(), g.labels().end(), 1));
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("fully homophilic planted graph") {
  PlantedConfig c;
  c.h = 0.0;
  const auto g = GeneratePlanted(c);
  CHECK(HeterophilyRatio(g) <= 0.03);
  CHECK(CountPositive(g) == 200);
}

TEST_CASE("balanced half-heterophilic planted graph") {
  PlantedConfig c;
  c.h = 0.5;
  c.pi_p = 0.5;
  const auto g = GeneratePlanted(c);
  CHECK(HeterophilyRatio(g) >= 0.47);
  CHECK(HeterophilyRatio(g) <= 0.53);
}

TEST_CASE("planted graphs are deterministic per seed") {
  PlantedConfig c;
  c.n = 300;
  c.h = 0.6;
  c.seed = 17;
  const auto a = GeneratePlanted(c), b = GeneratePlanted(c);
  CHECK(a.edges() == b.edges());
  CHECK(a.labels() == b.labels());
  CHECK(a.features() == b.features());
  c.seed = 18;
  CHECK(GeneratePlanted(c).edges() != a.edges());
}

TEST_CASE("heterophily and degree hold across 50 seeds") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    PlantedConfig c;
    c.n = 500;
    c.h = 0.05 * static_cast<double>(seed % 15);
    c.seed = seed;
    const auto g = GeneratePlanted(c);
    CHECK(std::abs(HeterophilyRatio(g) - c.h) <= 0.03);
    const auto deg = g.degrees();
    const double mean = std::accumulate(deg.begin(), deg.end(), 0.0) / static_cast<double>(c.n);
    CHECK(std::abs(mean - c.avg_degree) <= 0.1 * c.avg_degree);
  }
}

TEST_CASE("feature means sit at plus and minus the separation") {
  PlantedConfig c;
  c.n = 2000;
  c.pi_p = 0.5;
  c.feature_separation = 2.0;
  const auto g = GeneratePlanted(c);
  double pos = 0.0, neg = 0.0;
  for (NodeId i = 0; i < c.n; ++i) (g.labels()[i] == 1 ? pos : neg) += g.features()(i, 0);
  CHECK(pos / 1000.0 == doctest::Approx(2.0).epsilon(0.05));
  CHECK(neg / 1000.0 == doctest::Approx(-2.0).epsilon(0.05));
}

TEST_CASE("infeasible heterophily reports the achievable range") {
  PlantedConfig c;
  c.n = 100;
  c.pi_p = 0.02;
  c.h = 1.0;
  try {
    GeneratePlanted(c);
    FAIL("expected an error");
  } catch (const GraphError& e) {
    CHECK(std::string(e.what()).find("achievable") != std::string::npos);
  }
}

TEST_CASE("binarization examples") {
  const std::vector<int> a{0, 0, 1, 2};
  CHECK(BinarizeLabels(a) == std::vector<int>{1, 1, -1, -1});
  const std::vector<int> b{1, 1, 0, 0};
  CHECK(BinarizeLabels(b) == std::vector<int>{-1, -1, 1, 1});
  const std::vector<int> one{3, 3};
  CHECK_THROWS_WITH_AS(BinarizeLabels(one), "binarization needs at least two classes", GraphError);
}

TEST_CASE("split observing every positive leaves only negatives") {
  PlantedConfig c;
  c.n = 200;
  const auto g = GeneratePlanted(c);
  const auto s = MakePUSplit(g, 1.0, 0);
  CHECK(s.pi_true == 0.0);
  CHECK(s.positives.size() == 40);
  for (NodeId i : s.unlabeled) CHECK(g.labels()[i] == -1);
}

TEST_CASE("split counts for 100 positives and 300 negatives") {
  std::vector<int> labels(400, -1);
  for (int i = 0; i < 100; ++i) labels[4 * i] = 1;
  const auto g = SparseGraph::Build(400, std::vector<std::pair<NodeId, NodeId>>{{0, 1}},
                                    Matrix::Zero(400, 1), labels);
  const auto s = MakePUSplit(g, 0.5, 3);
  CHECK(s.positives.size() == 50);
  CHECK(s.unlabeled.size() == 350);
  CHECK(s.pi_true == doctest::Approx(50.0 / 350.0).epsilon(1e-15));
  for (NodeId i : s.positives) CHECK(g.labels()[i] == 1);
  ValidateSplit(s, 400);

  const auto t = MakePUSplit(g, 0.5, 3);
  CHECK(t.positives == s.positives);
  CHECK(MakePUSplit(g, 0.5, 4).positives != s.positives);
}

TEST_CASE("split needs positives and a valid fraction") {
  const auto g = SparseGraph::Build(2, std::vector<std::pair<NodeId, NodeId>>{{0, 1}},
                                    Matrix::Zero(2, 1), {-1, -1});
  CHECK_THROWS_WITH_AS(MakePUSplit(g, 0.5, 0), "graph has no positive nodes", GraphError);
  const auto h = gpl::testing::Make(2, {{0, 1}}, {1, -1});
  CHECK_THROWS_AS(MakePUSplit(h, 0.0, 0), GraphError);
  CHECK_THROWS_AS(MakePUSplit(h, 1.5, 0), GraphError);
}

TEST_CASE("dataset save and load is the identity") {
  PlantedConfig c;
  c.n = 150;
  c.feature_dim = 3;
  c.h = 0.4;
  const auto g = GeneratePlanted(c);
  const auto dir = TempDir("roundtrip");
  SaveDataset(g, dir);
  const auto back = LoadDataset(dir);
  CHECK(back.num_nodes() == g.num_nodes());
  CHECK(back.edges() == g.edges());
  CHECK(back.labels() == g.labels());
  CHECK(back.features() == g.features());
  fs::remove_all(dir);
}

TEST_CASE("multi-class labels are binarized on load") {
  const auto dir = TempDir("multiclass");
  std::ofstream(dir / "edges.tsv") << "0\t1\n1\t2\n";
  std::ofstream(dir / "features.csv") << "1.0\n2.0\n3.0\n";
  std::ofstream(dir / "labels.txt") << "2\n2\n5\n";
  const auto g = LoadDataset(dir);
  CHECK(g.labels() == std::vector<int>{1, 1, -1});
  fs::remove_all(dir);
}

TEST_CASE("malformed edge line names file and line") {
  const auto dir = TempDir("malformed");
  std::ofstream(dir / "edges.tsv") << "0\t1\na b\n";
  std::ofstream(dir / "features.csv") << "1.0\n2.0\n";
  std::ofstream(dir / "labels.txt") << "1\n-1\n";
  try {
    LoadDataset(dir);
    FAIL("expected an error");
  } catch (const GraphError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("edges.tsv:2") != std::string::npos);
    CHECK(msg.find("malformed edge line 'a b'") != std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("row-count mismatch and missing files are errors") {
  const auto dir = TempDir("mismatch");
  std::ofstream(dir / "edges.tsv") << "0\t1\n";
  std::ofstream(dir / "features.csv") << "1.0\n2.0\n3.0\n";
  std::ofstream(dir / "labels.txt") << "1\n-1\n";
  CHECK_THROWS_AS(LoadDataset(dir), GraphError);
  fs::remove(dir / "labels.txt");
  CHECK_THROWS_AS(LoadDataset(dir), GraphError);
  fs::remove_all(dir);
}

}  // TEST_SUITE
