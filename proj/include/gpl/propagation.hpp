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

#ifndef GPL_PROPAGATION_HPP_
#define GPL_PROPAGATION_HPP_

#include <span>
#include <vector>

#include "gpl/graph.hpp"
#include "gpl/split.hpp"

namespace gpl {

// n x 2 row-stochastic beliefs; column 0 is P(y=+1), column 1 is P(y=-1).
using BeliefMatrix = Eigen::Matrix<double, Eigen::Dynamic, 2>;

inline constexpr int kPositiveColumn = 0;
inline constexpr int kNegativeColumn = 1;
inline constexpr double kLogFloor = 1e-12;

struct PropagationConfig {
  double alpha = 0.5;  // retention, 0 < alpha < 1
  int k_prop = 10;     // propagation steps, >= 0

  void Validate() const;
};

// Observed positives and identified positives start at [1, 0], identified
// negatives at [0, 1], everything else at [0.5, 0.5].
BeliefMatrix InitBeliefs(const PUSplit& split,
                         std::span<const NodeId> identified_positive = {},
                         std::span<const NodeId> identified_negative = {});

// k_prop applications of E <- alpha E + (1 - alpha) P E.
BeliefMatrix Propagate(const SparseOperator& op, const BeliefMatrix& e0,
                       const PropagationConfig& cfg);

// Mean log P(y=-1) over `positives` plus mean log P(y=+1) over `negatives`.
// The negatives term is dropped when the set is empty. Logs are floored at
// kLogFloor.
double LplLoss(const BeliefMatrix& beliefs, std::span<const NodeId> positives,
               std::span<const NodeId> negatives);

struct LplGradient {
  double loss = 0.0;
  std::vector<double> d_raw;  // dL/d(raw mask parameter), one per edge
};

// Exact reverse-mode gradient of LplLoss(Propagate(PropagationOperator(g,
// mask), e0)) w.r.t. the raw mask parameters, differentiating through the
// per-row degree normalization.
LplGradient ComputeLplGradient(const SparseGraph& g, const EdgeMask& mask,
                               const BeliefMatrix& e0, const PropagationConfig& cfg,
                               std::span<const NodeId> positives,
                               std::span<const NodeId> negatives);

double EvaluateLpl(const SparseGraph& g, const EdgeMask& mask, const BeliefMatrix& e0,
                   const PropagationConfig& cfg, std::span<const NodeId> positives,
                   std::span<const NodeId> negatives);

struct MaskOptimizationResult {
  EdgeMask mask;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  int steps_taken = 0;
};

// Steepest descent on the raw mask with the gradient scaled to unit max-norm,
// so `lr` is the largest change of any raw parameter in one step. Each step
// halves the rate until the loss does not increase; optimization ends when
// no halving succeeds, the gradient vanishes, or the relative loss change of
// an accepted step falls below 1e-5. Raw parameters stay within +-30.
MaskOptimizationResult OptimizeMask(const SparseGraph& g, EdgeMask mask,
                                    const BeliefMatrix& e0, const PropagationConfig& cfg,
                                    std::span<const NodeId> positives,
                                    std::span<const NodeId> negatives, int steps,
                                    double lr);

}  // namespace gpl

#endif  // GPL_PROPAGATION_HPP_
