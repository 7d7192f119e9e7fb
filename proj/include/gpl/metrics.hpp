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

#ifndef GPL_METRICS_HPP_
#define GPL_METRICS_HPP_

#include <functional>
#include <span>
#include <vector>

#include "gpl/graph.hpp"
#include "gpl/propagation.hpp"

namespace gpl {

// F1 of the +1 class restricted to eval_set; 0 when precision + recall = 0.
double F1Score(std::span<const int> predicted, std::span<const int> truth,
               std::span<const NodeId> eval_set);

// Propagation routine under test. Swappable so the oracle checks can be
// pointed at a deliberately broken implementation.
using PropagateFn = std::function<BeliefMatrix(const SparseGraph&, const EdgeMask&,
                                               const BeliefMatrix&, const PropagationConfig&)>;

BeliefMatrix DefaultPropagate(const SparseGraph& g, const EdgeMask& mask,
                              const BeliefMatrix& e0, const PropagationConfig& cfg);

inline constexpr double kInfluenceStep = 1e-6;

// |d |P(y_a=-1)^(k) - P(y_a=-1)^(0)| / d P(y_b=-1)^(0)| by central
// differences on row b of e0; the row's positive entry moves opposite so it
// stays on the simplex.
double HeterophilyInfluence(const SparseGraph& g, const EdgeMask& mask, const BeliefMatrix& e0,
                            const PropagationConfig& cfg, NodeId a, NodeId b,
                            const PropagateFn& propagate = DefaultPropagate);

// Same quantity by enumerating every length-k walk from a to b on the lazy
// chain (stay with weight alpha, move along edge (i,j) with weight
// (1 - alpha) w_ij / sum_l w_il) and summing the walk products.
double WalkInfluence(const SparseGraph& g, const EdgeMask& mask, const PropagationConfig& cfg,
                     NodeId a, NodeId b);

struct Theorem2Report {
  double sum_hi = 0.0;         // sum_{b != a} HI(a, b) * P(y_b=-1)^(0)
  double delta = 0.0;          // |P(y_a=-1)^(k) - P(y_a=-1)^(0)|
  double residual = 0.0;       // |sum_hi - delta|
  double walk_sum = 0.0;       // same sum with WalkInfluence in place of HI
  double walk_residual = 0.0;  // |sum_hi - walk_sum|
  double final_negative = 0.0; // P(y_a=-1)^(k)
  bool passed = false;
};

inline constexpr double kTheorem2Tolerance = 1e-6;

// Node a must start at [1, 0]. Each source b contributes its influence in
// proportion to its initial negative mass, so pure positive sources carry
// nothing and pure negative sources carry HI(a, b).
Theorem2Report CheckTheorem2(const SparseGraph& g, const EdgeMask& mask, const BeliefMatrix& e0,
                             const PropagationConfig& cfg, NodeId a,
                             const PropagateFn& propagate = DefaultPropagate);

// 1/2 sum over heterophilic edges (i in P, j in N) of w_ij ||x_i - x_j||^2,
// with w the masked edge weight.
double DpnDistance(const Matrix& embeddings, const SparseGraph& g, const EdgeMask& mask);

// One aggregation step h_i = sum_j A~_ij x_j over the heterophilic edges,
// A~ row-normalized masked weights; nodes without heterophilic edges keep x.
Matrix HeterophilicAggregate(const Matrix& embeddings, const SparseGraph& g, const EdgeMask& mask);

struct Theorem4Report {
  double before = 0.0;
  double after = 0.0;
  bool passed = false;
};

inline constexpr double kTheorem4Slack = 1e-9;

Theorem4Report CheckTheorem4(const SparseGraph& g, const EdgeMask& mask, const Matrix& embeddings);

// Upper (1 - quantile) order statistic of the posteriors; quantile 0 gives
// the maximum.
double IrreducibilityDiagnostic(std::span<const double> scores, double quantile = 0.01);

}  // namespace gpl

#endif  // GPL_METRICS_HPP_
