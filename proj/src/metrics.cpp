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

#include "gpl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace gpl {

double F1Score(std::span<const int> predicted, std::span<const int> truth,
               std::span<const NodeId> eval_set) {
  if (predicted.size() != truth.size()) throw std::invalid_argument("F1: length mismatch");
  if (eval_set.empty()) throw std::invalid_argument("F1: empty evaluation set");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (NodeId i : eval_set) {
    if (i >= truth.size()) throw std::invalid_argument("F1: node out of range");
    const bool p = predicted[i] > 0;
    const bool t = truth[i] > 0;
    tp += p && t;
    fp += p && !t;
    fn += !p && t;
  }
  if (tp == 0) return 0.0;
  const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  return 2.0 * precision * recall / (precision + recall);
}

BeliefMatrix DefaultPropagate(const SparseGraph& g, const EdgeMask& mask,
                              const BeliefMatrix& e0, const PropagationConfig& cfg) {
  return Propagate(PropagationOperator(g, mask), e0, cfg);
}

namespace {

void CheckNode(const SparseGraph& g, NodeId i) {
  if (i >= g.num_nodes()) throw std::invalid_argument(fmt::format("node {} out of range", i));
}

double NegativeShift(const SparseGraph& g, const EdgeMask& mask, const BeliefMatrix& e0,
                     const PropagationConfig& cfg, NodeId a, const PropagateFn& propagate) {
  const BeliefMatrix ek = propagate(g, mask, e0, cfg);
  return std::abs(ek(a, kNegativeColumn) - e0(a, kNegativeColumn));
}

}  // namespace

double HeterophilyInfluence(const SparseGraph& g, const EdgeMask& mask, const BeliefMatrix& e0,
                            const PropagationConfig& cfg, NodeId a, NodeId b,
                            const PropagateFn& propagate) {
  CheckNode(g, a);
  CheckNode(g, b);
  if (a == b) throw std::invalid_argument("heterophily influence needs a != b");
  BeliefMatrix plus = e0;
  BeliefMatrix minus = e0;
  plus(b, kNegativeColumn) += kInfluenceStep;
  plus(b, kPositiveColumn) -= kInfluenceStep;
  minus(b, kNegativeColumn) -= kInfluenceStep;
  minus(b, kPositiveColumn) += kInfluenceStep;
  const double up = NegativeShift(g, mask, plus, cfg, a, propagate);
  const double down = NegativeShift(g, mask, minus, cfg, a, propagate);
  return std::abs((up - down) / (2.0 * kInfluenceStep));
}

double WalkInfluence(const SparseGraph& g, const EdgeMask& mask, const PropagationConfig& cfg,
                     NodeId a, NodeId b) {
  CheckNode(g, a);
  CheckNode(g, b);
  cfg.Validate();
  const auto w = mask.weights();
  std::vector<double> row_total(g.num_nodes(), 0.0);
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    row_total[g.edges()[e].u] += w[e];
    row_total[g.edges()[e].v] += w[e];
  }
  const double stay = cfg.alpha;
  const double move = 1.0 - cfg.alpha;

  double total = 0.0;
  // Depth-first over walks; `weight` is the product so far.
  auto walk = [&](auto&& self, NodeId at, int remaining, double weight) -> void {
    if (remaining == 0) {
      if (at == b) total += weight;
      return;
    }
    if (g.degree(at) == 0) {
      // Identity row: the whole (alpha + (1 - alpha)) mass stays.
      self(self, at, remaining - 1, weight);
      return;
    }
    self(self, at, remaining - 1, weight * stay);
    for (auto s = g.offsets()[at]; s < g.offsets()[at + 1]; ++s) {
      const double step = move * w[g.slot_edges()[s]] / row_total[at];
      self(self, g.cols()[s], remaining - 1, weight * step);
    }
  };
  walk(walk, a, cfg.k_prop, 1.0);
  return total;
}

Theorem2Report CheckTheorem2(const SparseGraph& g, const EdgeMask& mask, const BeliefMatrix& e0,
                             const PropagationConfig& cfg, NodeId a,
                             const PropagateFn& propagate) {
  CheckNode(g, a);
  if (e0(a, kPositiveColumn) != 1.0 || e0(a, kNegativeColumn) != 0.0) {
    throw std::invalid_argument(fmt::format("node {} must start as a pure positive", a));
  }
  Theorem2Report r;
  const BeliefMatrix ek = propagate(g, mask, e0, cfg);
  r.final_negative = ek(a, kNegativeColumn);
  r.delta = std::abs(ek(a, kNegativeColumn) - e0(a, kNegativeColumn));
  for (NodeId b = 0; b < g.num_nodes(); ++b) {
    if (b == a) continue;
    const double mass = e0(b, kNegativeColumn);
    if (mass == 0.0) continue;
    r.sum_hi += mass * HeterophilyInfluence(g, mask, e0, cfg, a, b, propagate);
    r.walk_sum += mass * WalkInfluence(g, mask, cfg, a, b);
  }
  r.residual = std::abs(r.sum_hi - r.delta);
  r.walk_residual = std::abs(r.sum_hi - r.walk_sum);
  r.passed = r.residual <= kTheorem2Tolerance && r.walk_residual <= kTheorem2Tolerance;
  return r;
}

double DpnDistance(const Matrix& embeddings, const SparseGraph& g, const EdgeMask& mask) {
  if (!g.has_labels()) throw std::invalid_argument("D_PN needs labels");
  if (static_cast<std::size_t>(embeddings.rows()) != g.num_nodes()) {
    throw std::invalid_argument("embedding rows do not match node count");
  }
  if (mask.size() != g.num_edges()) throw std::invalid_argument("mask size mismatch");
  double total = 0.0;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    if (!g.is_heterophilic(e)) continue;
    const Edge& ed = g.edges()[e];
    total += mask.weight(e) * (embeddings.row(ed.u) - embeddings.row(ed.v)).squaredNorm();
  }
  return 0.5 * total;
}

Matrix HeterophilicAggregate(const Matrix& embeddings, const SparseGraph& g, const EdgeMask& mask) {
  if (!g.has_labels()) throw std::invalid_argument("aggregation needs labels");
  if (mask.size() != g.num_edges()) throw std::invalid_argument("mask size mismatch");
  const std::size_t n = g.num_nodes();
  Matrix h = Matrix::Zero(embeddings.rows(), embeddings.cols());
  std::vector<double> total(n, 0.0);
  for (NodeId i = 0; i < n; ++i) {
    for (auto s = g.offsets()[i]; s < g.offsets()[i + 1]; ++s) {
      const EdgeId e = g.slot_edges()[s];
      if (!g.is_heterophilic(e)) continue;
      const double w = mask.weight(e);
      h.row(i) += w * embeddings.row(g.cols()[s]);
      total[i] += w;
    }
  }
  for (NodeId i = 0; i < n; ++i) {
    if (total[i] > 0.0) {
      h.row(i) /= total[i];
    } else {
      h.row(i) = embeddings.row(i);
    }
  }
  return h;
}

Theorem4Report CheckTheorem4(const SparseGraph& g, const EdgeMask& mask, const Matrix& embeddings) {
  Theorem4Report r;
  r.before = DpnDistance(embeddings, g, mask);
  r.after = DpnDistance(HeterophilicAggregate(embeddings, g, mask), g, mask);
  r.passed = r.after <= r.before + kTheorem4Slack;
  return r;
}

double IrreducibilityDiagnostic(std::span<const double> scores, double quantile) {
  if (scores.empty()) throw std::invalid_argument("no scores");
  if (!(quantile >= 0.0 && quantile < 1.0)) throw std::invalid_argument("quantile must lie in [0, 1)");
  std::vector<double> s(scores.begin(), scores.end());
  std::sort(s.begin(), s.end());
  const auto n = static_cast<double>(s.size());
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - quantile) * n));
  rank = std::clamp<std::size_t>(rank, 1, s.size());
  return s[rank - 1];
}

}  // namespace gpl
