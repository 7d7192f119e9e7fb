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

#include "gpl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

#include <fmt/format.h>

namespace gpl {

namespace {

std::uint64_t PairKey(NodeId u, NodeId v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint64_t>(v);
}

}  // namespace

SparseGraph SparseGraph::Build(std::size_t n,
                               std::span<const std::pair<NodeId, NodeId>> edges,
                               Matrix features, std::vector<int> labels) {
  if (features.rows() != static_cast<Eigen::Index>(n)) {
    throw GraphError(fmt::format("feature matrix has {} rows, expected {}",
                                 features.rows(), n));
  }
  if (!labels.empty() && labels.size() != n) {
    throw GraphError(
        fmt::format("label vector has {} rows, expected {}", labels.size(), n));
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 1 && labels[i] != -1) {
      throw GraphError(fmt::format("label row {} is {}, expected +1 or -1", i,
                                   labels[i]));
    }
  }

  SparseGraph g;
  g.n_ = n;
  g.features_ = std::move(features);
  g.labels_ = std::move(labels);
  g.edges_.reserve(edges.size());
  for (const auto& [a, b] : edges) {
    if (a >= n || b >= n) {
      throw GraphError(fmt::format("edge ({}, {}) has an endpoint >= n = {}", a,
                                   b, n));
    }
    if (a == b) throw GraphError(fmt::format("self-loop at node {}", a));
    g.edges_.push_back(Edge{std::min(a, b), std::max(a, b)});
  }
  std::sort(g.edges_.begin(), g.edges_.end());
  g.edges_.erase(std::unique(g.edges_.begin(), g.edges_.end()), g.edges_.end());

  std::vector<std::size_t> deg(n, 0);
  for (const Edge& e : g.edges_) {
    ++deg[e.u];
    ++deg[e.v];
  }
  g.offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] = g.offsets_[i] + deg[i];
  g.cols_.resize(g.offsets_[n]);
  g.slot_edges_.resize(g.offsets_[n]);
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  // Edges are sorted, so each row's neighbors come out in ascending order.
  for (EdgeId e = 0; e < g.edges_.size(); ++e) {
    const Edge& ed = g.edges_[e];
    g.cols_[cursor[ed.u]] = ed.v;
    g.slot_edges_[cursor[ed.u]++] = e;
  }
  for (EdgeId e = 0; e < g.edges_.size(); ++e) {
    const Edge& ed = g.edges_[e];
    g.cols_[cursor[ed.v]] = ed.u;
    g.slot_edges_[cursor[ed.v]++] = e;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto b = g.offsets_[i];
    const auto e = g.offsets_[i + 1];
    std::vector<std::pair<NodeId, EdgeId>> row;
    row.reserve(e - b);
    for (auto s = b; s < e; ++s) row.emplace_back(g.cols_[s], g.slot_edges_[s]);
    std::sort(row.begin(), row.end());
    for (auto s = b; s < e; ++s) {
      g.cols_[s] = row[s - b].first;
      g.slot_edges_[s] = row[s - b].second;
    }
  }
  return g;
}

std::vector<std::size_t> SparseGraph::degrees() const {
  std::vector<std::size_t> d(n_);
  for (std::size_t i = 0; i < n_; ++i) d[i] = degree(i);
  return d;
}

bool SparseGraph::has_edge(NodeId i, NodeId j) const {
  if (i >= n_ || j >= n_) return false;
  auto b = cols_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
  auto e = cols_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
  return std::binary_search(b, e, j);
}

SparseGraph SparseGraph::WithEdges(
    std::span<const std::pair<NodeId, NodeId>> edges) const {
  return Build(n_, edges, features_, labels_);
}

std::vector<std::pair<NodeId, NodeId>> EdgePairs(const SparseGraph& g) {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(g.num_edges());
  for (const Edge& e : g.edges()) out.emplace_back(e.u, e.v);
  return out;
}

double Logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double ex = std::exp(x);
  return ex / (1.0 + ex);
}

double Logit(double p) { return std::log(p / (1.0 - p)); }

EdgeMask::EdgeMask(std::size_t num_edges, double initial_weight)
    : raw_(num_edges, Logit(initial_weight)) {}

EdgeMask EdgeMask::FromRaw(std::vector<double> raw) {
  EdgeMask m;
  m.raw_ = std::move(raw);
  return m;
}

std::vector<double> EdgeMask::weights() const {
  std::vector<double> w(raw_.size());
  for (std::size_t e = 0; e < raw_.size(); ++e) w[e] = weight(e);
  return w;
}

Matrix SparseOperator::Apply(const Matrix& x) const {
  const std::size_t n = size();
  Matrix y(x.rows(), x.cols());
  for (std::size_t i = 0; i < n; ++i) {
    y.row(i) = diagonal_[i] * x.row(i);
    for (auto s = offsets_[i]; s < offsets_[i + 1]; ++s) {
      y.row(i) += values_[s] * x.row(cols_[s]);
    }
  }
  return y;
}

Matrix SparseOperator::ApplyTransposed(const Matrix& x) const {
  const std::size_t n = size();
  Matrix y(x.rows(), x.cols());
  for (std::size_t i = 0; i < n; ++i) y.row(i) = diagonal_[i] * x.row(i);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto s = offsets_[i]; s < offsets_[i + 1]; ++s) {
      y.row(cols_[s]) += values_[s] * x.row(i);
    }
  }
  return y;
}

Matrix SparseOperator::Dense() const {
  const auto n = static_cast<Eigen::Index>(size());
  Matrix d = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < size(); ++i) {
    d(i, i) += diagonal_[i];
    for (auto s = offsets_[i]; s < offsets_[i + 1]; ++s) d(i, cols_[s]) += values_[s];
  }
  return d;
}

double SparseOperator::RowSum(NodeId i) const {
  double s = diagonal_[i];
  for (auto k = offsets_[i]; k < offsets_[i + 1]; ++k) s += values_[k];
  return s;
}

namespace {

void CheckWeights(const SparseGraph& g, std::span<const double> w) {
  if (w.size() != g.num_edges()) {
    throw GraphError(fmt::format("mask has {} entries for a graph with {} edges",
                                 w.size(), g.num_edges()));
  }
  for (double x : w) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw GraphError(fmt::format("edge weight {} is not positive and finite", x));
    }
  }
}

std::vector<double> MaskedDegrees(const SparseGraph& g, std::span<const double> w) {
  std::vector<double> d(g.num_nodes(), 0.0);
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    d[g.edges()[e].u] += w[e];
    d[g.edges()[e].v] += w[e];
  }
  return d;
}

}  // namespace

SparseOperator PropagationOperator(const SparseGraph& g, const EdgeMask& mask) {
  const auto w = mask.weights();
  return PropagationOperator(g, w);
}

SparseOperator PropagationOperator(const SparseGraph& g, std::span<const double> w) {
  CheckWeights(g, w);
  const auto d = MaskedDegrees(g, w);
  const std::size_t n = g.num_nodes();
  std::vector<double> values(g.cols().size());
  std::vector<double> diag(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (g.degree(i) == 0) {
      diag[i] = 1.0;
      continue;
    }
    for (auto s = g.offsets()[i]; s < g.offsets()[i + 1]; ++s) {
      values[s] = w[g.slot_edges()[s]] / d[i];
    }
  }
  return SparseOperator(g.offsets(), g.cols(), std::move(values), std::move(diag));
}

SparseOperator GcnOperator(const SparseGraph& g, const EdgeMask& mask) {
  const auto w = mask.weights();
  return GcnOperator(g, w);
}

SparseOperator GcnOperator(const SparseGraph& g, std::span<const double> w) {
  CheckWeights(g, w);
  auto d = MaskedDegrees(g, w);
  for (double& x : d) x += 1.0;
  const std::size_t n = g.num_nodes();
  std::vector<double> inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(d[i]);
  std::vector<double> values(g.cols().size());
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) {
    diag[i] = inv_sqrt[i] * inv_sqrt[i];
    for (auto s = g.offsets()[i]; s < g.offsets()[i + 1]; ++s) {
      values[s] = w[g.slot_edges()[s]] * inv_sqrt[i] * inv_sqrt[g.cols()[s]];
    }
  }
  return SparseOperator(g.offsets(), g.cols(), std::move(values), std::move(diag));
}

double HeterophilyRatio(const SparseGraph& g) {
  if (!g.has_labels()) throw GraphError("graph has no labels");
  if (g.num_edges() == 0) throw GraphError("no edges");
  std::size_t cross = 0;
  for (EdgeId e = 0; e < g.num_edges(); ++e) cross += g.is_heterophilic(e) ? 1 : 0;
  return static_cast<double>(cross) / static_cast<double>(g.num_edges());
}

SparseGraph RewireToHeterophily(const SparseGraph& g, double target_h,
                                std::uint64_t seed) {
  if (!(target_h >= 0.0 && target_h <= 1.0)) {
    throw GraphError(fmt::format("target heterophily {} outside [0, 1]", target_h));
  }
  if (!g.has_labels()) throw GraphError("graph has no labels");
  const std::size_t m = g.num_edges();
  if (m == 0) throw GraphError("no edges");

  std::vector<NodeId> pos, neg;
  for (NodeId i = 0; i < g.num_nodes(); ++i) (g.labels()[i] > 0 ? pos : neg).push_back(i);
  const auto np = static_cast<std::uint64_t>(pos.size());
  const auto nn = static_cast<std::uint64_t>(neg.size());
  const std::uint64_t cross_pairs = np * nn;
  const std::uint64_t within_pairs = np * (np - (np > 0)) / 2 + nn * (nn - (nn > 0)) / 2;

  const auto target_cross =
      static_cast<std::uint64_t>(std::llround(target_h * static_cast<double>(m)));
  if (target_cross > cross_pairs || m - target_cross > within_pairs) {
    const double lo = m > within_pairs ? static_cast<double>(m - within_pairs) / m : 0.0;
    const double hi = std::min<double>(1.0, static_cast<double>(cross_pairs) / m);
    throw GraphError(fmt::format(
        "heterophily {} unreachable with {} edges; achievable range [{:.4f}, {:.4f}]",
        target_h, m, lo, hi));
  }

  std::vector<std::pair<NodeId, NodeId>> hetero, homo;
  std::unordered_set<std::uint64_t> present;
  present.reserve(2 * m);
  for (EdgeId e = 0; e < m; ++e) {
    const Edge& ed = g.edges()[e];
    (g.is_heterophilic(e) ? hetero : homo).emplace_back(ed.u, ed.v);
    present.insert(PairKey(ed.u, ed.v));
  }
  if (hetero.size() == target_cross) return g;

  std::mt19937_64 rng(seed);
  const bool raise = hetero.size() < target_cross;
  auto& remove_from = raise ? homo : hetero;
  auto& add_to = raise ? hetero : homo;

  // Uniform absent pair of the requested kind. Rejection sampling first;
  // falls back to enumeration when the kind is nearly saturated.
  auto sample_absent = [&](bool cross) -> std::pair<NodeId, NodeId> {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      NodeId a, b;
      if (cross) {
        a = pos[std::uniform_int_distribution<std::size_t>(0, pos.size() - 1)(rng)];
        b = neg[std::uniform_int_distribution<std::size_t>(0, neg.size() - 1)(rng)];
      } else {
        const std::uint64_t pp = np * (np - (np > 0)) / 2;
        const bool from_pos =
            std::uniform_int_distribution<std::uint64_t>(0, within_pairs - 1)(rng) < pp;
        const auto& side = from_pos ? pos : neg;
        std::uniform_int_distribution<std::size_t> pick(0, side.size() - 1);
        a = side[pick(rng)];
        b = side[pick(rng)];
        if (a == b) continue;
      }
      if (!present.contains(PairKey(a, b))) return {std::min(a, b), std::max(a, b)};
    }
    std::vector<std::pair<NodeId, NodeId>> candidates;
    const NodeId n = g.num_nodes();
    for (NodeId a = 0; a < n; ++a) {
      for (NodeId b = a + 1; b < n; ++b) {
        if ((g.labels()[a] != g.labels()[b]) == cross && !present.contains(PairKey(a, b))) {
          candidates.emplace_back(a, b);
        }
      }
    }
    return candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
  };

  while (hetero.size() != target_cross) {
    std::uniform_int_distribution<std::size_t> pick(0, remove_from.size() - 1);
    const std::size_t idx = pick(rng);
    const auto victim = remove_from[idx];
    remove_from[idx] = remove_from.back();
    remove_from.pop_back();
    const auto fresh = sample_absent(raise);
    present.erase(PairKey(victim.first, victim.second));
    present.insert(PairKey(fresh.first, fresh.second));
    add_to.push_back(fresh);
  }

  std::vector<std::pair<NodeId, NodeId>> all;
  all.reserve(m);
  all.insert(all.end(), hetero.begin(), hetero.end());
  all.insert(all.end(), homo.begin(), homo.end());
  return g.WithEdges(all);
}

}  // namespace gpl
