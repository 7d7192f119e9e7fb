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

#include "gpl/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace gpl {

namespace {

constexpr int kMaxHalvings = 30;
// Keeps logistic(raw) strictly inside (0, 1) in double precision.
constexpr double kRawLimit = 30.0;
constexpr double kRelativeTolerance = 1e-5;

double FlooredLog(double x) { return std::log(x > kLogFloor ? x : kLogFloor); }

void CheckSets(std::span<const NodeId> positives, std::span<const NodeId> negatives,
               std::size_t n) {
  if (positives.empty()) throw std::invalid_argument("empty positive set");
  std::vector<char> seen(n, 0);
  for (NodeId i : positives) {
    if (i >= n) throw std::invalid_argument(fmt::format("positive node {} out of range", i));
    seen[i] = 1;
  }
  for (NodeId i : negatives) {
    if (i >= n) throw std::invalid_argument(fmt::format("negative node {} out of range", i));
    if (seen[i] == 1) {
      throw std::invalid_argument(fmt::format("node {} is both positive and negative", i));
    }
  }
}

}  // namespace

void PropagationConfig::Validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument(fmt::format("alpha must lie in (0, 1), got {}", alpha));
  }
  if (k_prop < 0) throw std::invalid_argument("k_prop must be >= 0");
}

BeliefMatrix InitBeliefs(const PUSplit& split, std::span<const NodeId> identified_positive,
                         std::span<const NodeId> identified_negative) {
  const std::size_t n = split.num_nodes();
  BeliefMatrix e0 = BeliefMatrix::Constant(static_cast<Eigen::Index>(n), 2, 0.5);
  std::vector<int> mark(n, 0);
  for (NodeId i : identified_positive) {
    if (i >= n) throw std::invalid_argument(fmt::format("identified node {} out of range", i));
    mark[i] = 1;
  }
  for (NodeId i : identified_negative) {
    if (i >= n) throw std::invalid_argument(fmt::format("identified node {} out of range", i));
    if (mark[i] == 1) {
      throw std::invalid_argument(
          fmt::format("node {} identified as both positive and negative", i));
    }
    mark[i] = -1;
  }
  for (NodeId i : split.positives) {
    if (mark[i] == -1) {
      throw std::invalid_argument(
          fmt::format("observed positive {} identified as negative", i));
    }
    mark[i] = 1;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (mark[i] == 1) e0.row(i) << 1.0, 0.0;
    if (mark[i] == -1) e0.row(i) << 0.0, 1.0;
  }
  return e0;
}

BeliefMatrix Propagate(const SparseOperator& op, const BeliefMatrix& e0,
                       const PropagationConfig& cfg) {
  cfg.Validate();
  if (op.size() != static_cast<std::size_t>(e0.rows())) {
    throw std::invalid_argument("belief rows do not match operator size");
  }
  BeliefMatrix e = e0;
  for (int k = 0; k < cfg.k_prop; ++k) {
    e = cfg.alpha * e + (1.0 - cfg.alpha) * op.Apply(e);
  }
  return e;
}

double LplLoss(const BeliefMatrix& beliefs, std::span<const NodeId> positives,
               std::span<const NodeId> negatives) {
  CheckSets(positives, negatives, static_cast<std::size_t>(beliefs.rows()));
  double pos = 0.0;
  for (NodeId i : positives) pos += FlooredLog(beliefs(i, kNegativeColumn));
  double loss = pos / static_cast<double>(positives.size());
  if (!negatives.empty()) {
    double neg = 0.0;
    for (NodeId i : negatives) neg += FlooredLog(beliefs(i, kPositiveColumn));
    loss += neg / static_cast<double>(negatives.size());
  }
  return loss;
}

double EvaluateLpl(const SparseGraph& g, const EdgeMask& mask, const BeliefMatrix& e0,
                   const PropagationConfig& cfg, std::span<const NodeId> positives,
                   std::span<const NodeId> negatives) {
  return LplLoss(Propagate(PropagationOperator(g, mask), e0, cfg), positives, negatives);
}

LplGradient ComputeLplGradient(const SparseGraph& g, const EdgeMask& mask,
                               const BeliefMatrix& e0, const PropagationConfig& cfg,
                               std::span<const NodeId> positives,
                               std::span<const NodeId> negatives) {
  cfg.Validate();
  const std::size_t n = g.num_nodes();
  CheckSets(positives, negatives, n);
  const SparseOperator op = PropagationOperator(g, mask);
  const double a = cfg.alpha;

  std::vector<BeliefMatrix> trail;
  trail.reserve(static_cast<std::size_t>(cfg.k_prop) + 1);
  trail.push_back(e0);
  for (int k = 0; k < cfg.k_prop; ++k) {
    trail.push_back(a * trail.back() + (1.0 - a) * op.Apply(trail.back()));
  }
  const BeliefMatrix& final_beliefs = trail.back();

  LplGradient out;
  out.loss = LplLoss(final_beliefs, positives, negatives);
  out.d_raw.assign(g.num_edges(), 0.0);

  BeliefMatrix adj = BeliefMatrix::Zero(static_cast<Eigen::Index>(n), 2);
  const double wp = 1.0 / static_cast<double>(positives.size());
  for (NodeId i : positives) {
    const double x = final_beliefs(i, kNegativeColumn);
    if (x > kLogFloor) adj(i, kNegativeColumn) += wp / x;
  }
  if (!negatives.empty()) {
    const double wn = 1.0 / static_cast<double>(negatives.size());
    for (NodeId i : negatives) {
      const double x = final_beliefs(i, kPositiveColumn);
      if (x > kLogFloor) adj(i, kPositiveColumn) += wn / x;
    }
  }

  // Adjoint of each operator slot, accumulated over the unrolled steps.
  std::vector<double> d_slot(g.cols().size(), 0.0);
  for (int k = cfg.k_prop; k >= 1; --k) {
    const BeliefMatrix& prev = trail[static_cast<std::size_t>(k) - 1];
    for (std::size_t i = 0; i < n; ++i) {
      for (auto s = g.offsets()[i]; s < g.offsets()[i + 1]; ++s) {
        d_slot[s] += (1.0 - a) * adj.row(i).dot(prev.row(g.cols()[s]));
      }
    }
    adj = a * adj + (1.0 - a) * op.ApplyTransposed(adj);
  }

  // P_ij = w_ij / d_i  =>  dL/dw_ik (through row i) = (dP_ik - sum_j dP_ij P_ij) / d_i.
  const auto w = mask.weights();
  std::vector<double> deg(n, 0.0);
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    deg[g.edges()[e].u] += w[e];
    deg[g.edges()[e].v] += w[e];
  }
  std::vector<double> d_weight(g.num_edges(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (g.degree(i) == 0) continue;
    double centered = 0.0;
    for (auto s = g.offsets()[i]; s < g.offsets()[i + 1]; ++s) {
      centered += d_slot[s] * op.values()[s];
    }
    for (auto s = g.offsets()[i]; s < g.offsets()[i + 1]; ++s) {
      d_weight[g.slot_edges()[s]] += (d_slot[s] - centered) / deg[i];
    }
  }
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    out.d_raw[e] = d_weight[e] * w[e] * (1.0 - w[e]);
  }
  return out;
}

MaskOptimizationResult OptimizeMask(const SparseGraph& g, EdgeMask mask,
                                    const BeliefMatrix& e0, const PropagationConfig& cfg,
                                    std::span<const NodeId> positives,
                                    std::span<const NodeId> negatives, int steps,
                                    double lr) {
  if (steps < 0) throw std::invalid_argument("steps must be >= 0");
  if (!(lr >= 0.0)) throw std::invalid_argument("mask learning rate must be >= 0");

  MaskOptimizationResult result;
  double loss = EvaluateLpl(g, mask, e0, cfg, positives, negatives);
  if (!std::isfinite(loss)) throw std::runtime_error("non-finite LPL loss at initialization");
  result.initial_loss = loss;

  for (int step = 0; step < steps && lr > 0.0; ++step) {
    const LplGradient grad = ComputeLplGradient(g, mask, e0, cfg, positives, negatives);
    double scale = 0.0;
    for (double d : grad.d_raw) scale = std::max(scale, std::abs(d));
    if (scale == 0.0) break;
    double rate = lr / scale;
    bool accepted = false;
    double next_loss = loss;
    EdgeMask trial = mask;
    for (int h = 0; h <= kMaxHalvings; ++h, rate *= 0.5) {
      for (EdgeId e = 0; e < mask.size(); ++e) {
        trial.mutable_raw()[e] =
            std::clamp(mask.raw()[e] - rate * grad.d_raw[e], -kRawLimit, kRawLimit);
      }
      next_loss = EvaluateLpl(g, trial, e0, cfg, positives, negatives);
      if (std::isfinite(next_loss) && next_loss <= loss) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    mask = trial;
    ++result.steps_taken;
    const double change = std::abs(loss - next_loss) / std::max(std::abs(loss), 1e-300);
    loss = next_loss;
    if (change < kRelativeTolerance) break;
  }
  result.final_loss = loss;
  result.mask = std::move(mask);
  return result;
}

}  // namespace gpl
