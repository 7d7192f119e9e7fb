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

#ifndef GPL_SPLIT_HPP_
#define GPL_SPLIT_HPP_

#include <vector>

#include "gpl/graph.hpp"

namespace gpl {

// Observed positives and the unlabeled remainder. Both lists are sorted.
struct PUSplit {
  std::vector<NodeId> positives;
  std::vector<NodeId> unlabeled;
  double r_p = 0.0;
  // Fraction of hidden positives among the unlabeled nodes.
  double pi_true = 0.0;

  std::size_t num_nodes() const { return positives.size() + unlabeled.size(); }
};

// Throws GraphError unless positives and unlabeled partition [0, n).
void ValidateSplit(const PUSplit& split, std::size_t n);

}  // namespace gpl

#endif  // GPL_SPLIT_HPP_
