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

#ifndef GPL_SYNTH_HPP_
#define GPL_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "gpl/graph.hpp"
#include "gpl/split.hpp"

namespace gpl {

// Two-block planted graph. Positives and negatives have spherical unit
// Gaussian features centred at +separation*e1 and -separation*e1.
struct PlantedConfig {
  std::size_t n = 1000;
  double pi_p = 0.2;
  double h = 0.5;
  double avg_degree = 10.0;
  std::size_t feature_dim = 8;
  double feature_separation = 1.0;
  std::uint64_t seed = 0;

  void Validate() const;
};

// Exactly floor(pi_p * n) positives, placed at random node ids. Edge counts
// per block are fixed: m = round(n * avg_degree / 2) edges of which
// round(h * m) join the classes; the homophilic remainder is split between
// the two blocks in proportion to their pair counts. Pairs within each
// block are uniform without replacement.
SparseGraph GeneratePlanted(const PlantedConfig& cfg);

// Largest class becomes +1, everything else -1. Ties go to the smallest
// class id.
std::vector<int> BinarizeLabels(std::span<const int> classes);

// round(r_p * #positives) positives (at least one) chosen uniformly become
// observed; the rest of the nodes are unlabeled.
PUSplit MakePUSplit(const SparseGraph& g, double r_p, std::uint64_t seed);

// Directory layout: edges.tsv ("i<TAB>j" per line), features.csv, and
// labels.txt (+1/-1 per line, or integer class ids which are binarized).
SparseGraph LoadDataset(const std::filesystem::path& dir);
void SaveDataset(const SparseGraph& g, const std::filesystem::path& dir);

}  // namespace gpl

#endif  // GPL_SYNTH_HPP_
