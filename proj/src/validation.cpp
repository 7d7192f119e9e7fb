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

#include "gpl/validation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>
#include <random>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "gpl/gnn.hpp"

namespace gpl {

BeliefMatrix PropagateWithoutRenormalization(const SparseGraph& g, const EdgeMask& mask,
                                             const BeliefMatrix& e0, const PropagationConfig& cfg) {
  const std::size_t n = g.num_nodes();
  std::vector<double> values(g.cols().size());
  std::vector<double> diag(n, 0.0);
  for (NodeId i = 0; i < n; ++i) {
    const std::size_t deg = g.degree(i);
    if (deg == 0) diag[i] = 1.0;
    for (std::size_t s = g.offsets()[i]; s < g.offsets()[i + 1]; ++s) {
      values[s] = mask.weight(g.slot_edges()[s]) / static_cast<double>(deg);
    }
  }
  const SparseOperator op(g.offsets(), g.cols(), std::move(values), std::move(diag));
  return Propagate(op, e0, cfg);
}

namespace {

using Rng = std::mt19937_64;

int UniformInt(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
double Uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Random labeled graph with at least one edge and both labels present.
SparseGraph RandomGraph(Rng& rng, int n_min, int n_max, double p, Eigen::Index feature_dim = 1) {
  const int n = UniformInt(rng, n_min, n_max);
  std::vector<std::pair<NodeId, NodeId>> edges;
  while (edges.empty()) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (Uniform(rng, 0.0, 1.0) < p) edges.emplace_back(i, j);
      }
    }
  }
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = Uniform(rng, 0.0, 1.0) < 0.5 ? 1 : -1;
  labels[0] = 1;
  labels[n - 1] = -1;
  Matrix x(n, feature_dim);
  std::normal_distribution<double> normal;
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  return SparseGraph::Build(n, edges, std::move(x), std::move(labels));
}

EdgeMask RandomMask(Rng& rng, std::size_t m) {
  std::vector<double> raw(m);
  for (double& r : raw) r = Uniform(rng, -2.0, 2.0);
  return EdgeMask::FromRaw(std::move(raw));
}

PropagationConfig RandomProp(Rng& rng, int k_max) {
  return {Uniform(rng, 0.1, 0.9), UniformInt(rng, 1, k_max)};
}

double RelativeError(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

OracleCheck LplGradientCheck() {
  OracleCheck c{"lpl_gradient_vs_central_differences", 20, 0.0, 1e-4, false};
  Rng rng(101);
  for (int t = 0; t < c.instances; ++t) {
    const SparseGraph g = RandomGraph(rng, 4, 12, 0.35);
    const EdgeMask mask = RandomMask(rng, g.num_edges());
    const PropagationConfig cfg = RandomProp(rng, 4);
    const std::size_t n = g.num_nodes();
    BeliefMatrix e0(n, 2);
    std::vector<NodeId> pos, neg;
    for (NodeId i = 0; i < n; ++i) {
      const double u = Uniform(rng, 0.0, 1.0);
      if (i == 0 || u < 0.3) {
        e0.row(i) << 1.0, 0.0;
        pos.push_back(i);
      } else if (u < 0.6) {
        e0.row(i) << 0.0, 1.0;
        neg.push_back(i);
      } else {
        e0.row(i) << 0.5, 0.5;
      }
    }
    const LplGradient grad = ComputeLplGradient(g, mask, e0, cfg, pos, neg);
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
      if (std::abs(grad.d_raw[e]) <= 1e-8) continue;
      std::vector<double> up = mask.raw(), down = mask.raw();
      up[e] += 1e-5;
      down[e] -= 1e-5;
      const double fd = (EvaluateLpl(g, EdgeMask::FromRaw(up), e0, cfg, pos, neg) -
                         EvaluateLpl(g, EdgeMask::FromRaw(down), e0, cfg, pos, neg)) /
                        2e-5;
      c.worst = std::max(c.worst, RelativeError(grad.d_raw[e], fd));
    }
  }
  c.passed = c.worst <= c.tolerance;
  return c;
}

OracleCheck ClassifierGradientCheck() {
  OracleCheck c{"classifier_gradient_vs_central_differences", 20, 0.0, 1e-4, false};
  Rng rng(202);
  for (int t = 0; t < c.instances; ++t) {
    const SparseGraph g = RandomGraph(rng, 4, 12, 0.35, 3);
    const EdgeMask mask = RandomMask(rng, g.num_edges());
    const SparseOperator op = GcnOperator(g, mask);
    PUSplit split;
    std::vector<NodeId> unl;
    for (NodeId i = 0; i < g.num_nodes(); ++i) {
      (i == 0 || Uniform(rng, 0.0, 1.0) < 0.3 ? split.positives : unl).push_back(i);
    }
    if (unl.empty()) {
      unl.push_back(split.positives.back());
      split.positives.pop_back();
    }
    split.unlabeled = unl;
    SelectionResult sel;
    for (NodeId u : unl) (Uniform(rng, 0.0, 1.0) < 0.3 ? sel.selected : sel.rest).push_back(u);

    const ClassifierState state = ClassifierState::Init(3, 3, 1000 + t);
    ClassifierParams p = state.params;
    for (Eigen::Index i = 0; i < p.b1.size(); ++i) p.b1(i) = Uniform(rng, -0.2, 0.2);
    p.b2 = Uniform(rng, -0.2, 0.2);
    const LossGradient lg = PuLossGradient(p, op, g.features(), split, sel);
    const std::vector<double> flat = p.Flatten();
    const std::vector<double> analytic = lg.grad.Flatten();
    for (std::size_t k = 0; k < flat.size(); ++k) {
      if (std::abs(analytic[k]) <= 1e-8) continue;
      std::vector<double> up = flat, down = flat;
      up[k] += 1e-6;
      down[k] -= 1e-6;
      ClassifierParams pu = p, pd = p;
      pu.Assign(up);
      pd.Assign(down);
      const double fd = (PuLoss(Forward(pu, op, g.features()), split, sel) -
                         PuLoss(Forward(pd, op, g.features()), split, sel)) /
                        2e-6;
      c.worst = std::max(c.worst, RelativeError(analytic[k], fd));
    }
  }
  c.passed = c.worst <= c.tolerance;
  return c;
}

BeliefMatrix RandomBeliefs(Rng& rng, std::size_t n) {
  BeliefMatrix e(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = Uniform(rng, 0.0, 1.0);
    e.row(i) << p, 1.0 - p;
  }
  return e;
}

OracleCheck RowStochasticCheck() {
  OracleCheck c{"propagation_row_sums", 100, 0.0, 1e-10, false};
  Rng rng(303);
  for (int t = 0; t < c.instances; ++t) {
    const SparseGraph g = RandomGraph(rng, 2, 30, 0.2);
    const EdgeMask mask = RandomMask(rng, g.num_edges());
    const PropagationConfig cfg = RandomProp(rng, 20);
    const BeliefMatrix ek = Propagate(PropagationOperator(g, mask), RandomBeliefs(rng, g.num_nodes()), cfg);
    c.worst = std::max(c.worst, (ek.rowwise().sum().array() - 1.0).abs().maxCoeff());
  }
  c.passed = c.worst <= c.tolerance;
  return c;
}

OracleCheck DenseOracleCheck() {
  OracleCheck c{"propagation_vs_dense_iteration", 50, 0.0, 1e-12, false};
  Rng rng(404);
  for (int t = 0; t < c.instances; ++t) {
    const SparseGraph g = RandomGraph(rng, 2, 10, 0.3);
    const std::size_t n = g.num_nodes();
    const EdgeMask mask = RandomMask(rng, g.num_edges());
    const PropagationConfig cfg = RandomProp(rng, 8);
    const BeliefMatrix e0 = RandomBeliefs(rng, n);

    Matrix w = Matrix::Zero(n, n);
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
      w(g.edges()[e].u, g.edges()[e].v) = w(g.edges()[e].v, g.edges()[e].u) = mask.weight(e);
    }
    Matrix p = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = w.row(i).sum();
      if (d > 0.0) {
        p.row(i) = w.row(i) / d;
      } else {
        p(i, i) = 1.0;
      }
    }
    Matrix dense = e0;
    for (int k = 0; k < cfg.k_prop; ++k) dense = cfg.alpha * dense + (1.0 - cfg.alpha) * p * dense;
    const BeliefMatrix sparse = Propagate(PropagationOperator(g, mask), e0, cfg);
    c.worst = std::max(c.worst, (dense - sparse).cwiseAbs().maxCoeff());
  }
  c.passed = c.worst <= c.tolerance;
  return c;
}

struct Theorem2Instance {
  SparseGraph g;
  EdgeMask mask;
  PropagationConfig cfg;
  BeliefMatrix e0;
  NodeId a = 0;
};

std::vector<Theorem2Instance> Theorem2Instances() {
  Rng rng(505);
  std::vector<Theorem2Instance> out;
  for (int t = 0; t < 50; ++t) {
    Theorem2Instance in;
    in.g = RandomGraph(rng, 3, 20, 0.25);
    in.mask = RandomMask(rng, in.g.num_edges());
    in.cfg = RandomProp(rng, 4);
    const std::size_t n = in.g.num_nodes();
    in.e0.resize(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
      if (Uniform(rng, 0.0, 1.0) < 0.4) {
        in.e0.row(i) << 1.0, 0.0;
      } else {
        in.e0.row(i) << 0.0, 1.0;
      }
    }
    in.a = in.g.edges().front().u;
    in.e0.row(in.a) << 1.0, 0.0;
    out.push_back(std::move(in));
  }
  return out;
}

void Theorem2Checks(std::vector<OracleCheck>& out) {
  const auto instances = Theorem2Instances();
  OracleCheck fd{"influence_sum_equals_belief_shift", 0, 0.0, kTheorem2Tolerance, false};
  OracleCheck walk{"influence_matches_walk_enumeration", 0, 0.0, kTheorem2Tolerance, false};
  OracleCheck mutant{"mutation_without_renormalization_detected", 0, 0.0, kTheorem2Tolerance,
                     false};
  for (const auto& in : instances) {
    const Theorem2Report r = CheckTheorem2(in.g, in.mask, in.e0, in.cfg, in.a);
    fd.worst = std::max(fd.worst, r.residual);
    walk.worst = std::max(walk.worst, r.walk_residual);
    ++fd.instances;
    ++walk.instances;
    const Theorem2Report m =
        CheckTheorem2(in.g, in.mask, in.e0, in.cfg, in.a, PropagateWithoutRenormalization);
    // For the mutant the interesting number is how far it strays; the check
    // passes when some instance exposes it.
    mutant.worst = std::max(mutant.worst, std::max(m.residual, m.walk_residual));
    ++mutant.instances;
  }
  fd.passed = fd.worst <= fd.tolerance;
  walk.passed = walk.worst <= walk.tolerance;
  mutant.passed = mutant.worst > mutant.tolerance;
  out.push_back(fd);
  out.push_back(walk);
  out.push_back(mutant);
}

std::vector<int> HopDistances(const SparseGraph& g, NodeId a) {
  std::vector<int> dist(g.num_nodes(), -1);
  std::queue<NodeId> q;
  dist[a] = 0;
  q.push(a);
  while (!q.empty()) {
    const NodeId i = q.front();
    q.pop();
    for (std::size_t s = g.offsets()[i]; s < g.offsets()[i + 1]; ++s) {
      const NodeId j = g.cols()[s];
      if (dist[j] < 0) {
        dist[j] = dist[i] + 1;
        q.push(j);
      }
    }
  }
  return dist;
}

OracleCheck InfluenceSupportCheck() {
  OracleCheck c{"influence_zero_beyond_k_hops", 0, 0.0, 0.0, false};
  Rng rng(606);
  for (int t = 0; t < 30; ++t) {
    const SparseGraph g = RandomGraph(rng, 6, 20, 0.12);
    const EdgeMask mask = RandomMask(rng, g.num_edges());
    const PropagationConfig cfg = RandomProp(rng, 3);
    const BeliefMatrix e0 = RandomBeliefs(rng, g.num_nodes());
    const NodeId a = 0;
    const auto dist = HopDistances(g, a);
    for (NodeId b = 1; b < g.num_nodes(); ++b) {
      if (dist[b] >= 0 && dist[b] <= cfg.k_prop) continue;
      c.worst = std::max(c.worst, HeterophilyInfluence(g, mask, e0, cfg, a, b));
      ++c.instances;
    }
  }
  c.passed = c.worst <= c.tolerance;
  return c;
}

OracleCheck Theorem4Check() {
  OracleCheck c{"dpn_contraction", 100, 0.0, kTheorem4Slack, false};
  Rng rng(707);
  std::normal_distribution<double> normal;
  for (int t = 0; t < c.instances; ++t) {
    const SparseGraph g = RandomGraph(rng, 2, 30, 0.15);
    const EdgeMask mask = RandomMask(rng, g.num_edges());
    Matrix x(g.num_nodes(), UniformInt(rng, 1, 5));
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
    const Theorem4Report r = CheckTheorem4(g, mask, x);
    // Record the overshoot; negative means strict contraction.
    c.worst = std::max(c.worst, r.after - r.before);
  }
  c.passed = c.worst <= c.tolerance;
  return c;
}

}  // namespace

std::vector<OracleCheck> RunOracleSuite() {
  std::vector<OracleCheck> out;
  out.push_back(LplGradientCheck());
  out.push_back(ClassifierGradientCheck());
  out.push_back(RowStochasticCheck());
  out.push_back(DenseOracleCheck());
  Theorem2Checks(out);
  out.push_back(InfluenceSupportCheck());
  out.push_back(Theorem4Check());
  return out;
}

void WriteOracleCsv(std::ostream& out, std::span<const OracleCheck> checks) {
  out << "check,instances,worst,tolerance,status\n";
  for (const OracleCheck& c : checks) {
    fmt::print(out, "{},{},{:.6e},{:.1e},{}\n", c.name, c.instances, c.worst, c.tolerance,
               c.passed ? "pass" : "FAIL");
  }
}

}  // namespace gpl
