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

#ifndef GPL_GRAPH_HPP_
#define GPL_GRAPH_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace gpl {

using NodeId = std::size_t;
using EdgeId = std::size_t;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Raised for malformed graphs, masks and datasets.
class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Edge {
  NodeId u = 0;  // u < v
  NodeId v = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Immutable undirected graph with node features and +1/-1 labels.
//
// Edges are stored once in canonical (u < v) order, sorted. A CSR view over
// both directions maps each adjacency slot back to its undirected edge id so
// per-edge quantities (mask weights, gradients) can be gathered per row.
class SparseGraph {
 public:
  SparseGraph() = default;

  // Validates and canonicalizes. Duplicate pairs in either orientation are
  // collapsed. Throws GraphError on self-loops, out-of-range endpoints, or
  // a feature/label row count different from n. Empty `labels` is allowed
  // (unlabeled graph).
  static SparseGraph Build(std::size_t n,
                           std::span<const std::pair<NodeId, NodeId>> edges,
                           Matrix features, std::vector<int> labels);

  std::size_t num_nodes() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Matrix& features() const { return features_; }
  const std::vector<int>& labels() const { return labels_; }
  bool has_labels() const { return !labels_.empty(); }

  std::size_t degree(NodeId i) const { return offsets_[i + 1] - offsets_[i]; }
  std::vector<std::size_t> degrees() const;

  // CSR rows: neighbors of i are cols()[offsets()[i] .. offsets()[i+1]).
  const std::vector<std::size_t>& offsets() const { return offsets_; }
  const std::vector<NodeId>& cols() const { return cols_; }
  const std::vector<EdgeId>& slot_edges() const { return slot_edges_; }

  bool has_edge(NodeId i, NodeId j) const;
  bool is_heterophilic(EdgeId e) const {
    return labels_[edges_[e].u] != labels_[edges_[e].v];
  }

  SparseGraph WithEdges(std::span<const std::pair<NodeId, NodeId>> edges) const;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  Matrix features_;
  std::vector<int> labels_;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> cols_;
  std::vector<EdgeId> slot_edges_;
};

std::vector<std::pair<NodeId, NodeId>> EdgePairs(const SparseGraph& g);

double Logistic(double x);
double Logit(double p);

// Learnable per-edge weights in (0, 1), one raw parameter per undirected
// edge, weight = logistic(raw).
class EdgeMask {
 public:
  static constexpr double kInitialWeight = 0.95;

  EdgeMask() = default;
  explicit EdgeMask(std::size_t num_edges, double initial_weight = kInitialWeight);
  static EdgeMask FromRaw(std::vector<double> raw);

  std::size_t size() const { return raw_.size(); }
  double weight(EdgeId e) const { return Logistic(raw_[e]); }
  std::vector<double> weights() const;
  const std::vector<double>& raw() const { return raw_; }
  std::vector<double>& mutable_raw() { return raw_; }

 private:
  std::vector<double> raw_;
};

// Sparse n x n operator: diagonal plus off-diagonal values laid out on the
// graph's CSR slots. Both the label-propagation operator and the GCN
// normalization are represented this way.
class SparseOperator {
 public:
  SparseOperator() = default;
  SparseOperator(std::vector<std::size_t> offsets, std::vector<NodeId> cols,
                 std::vector<double> values, std::vector<double> diagonal)
      : offsets_(std::move(offsets)),
        cols_(std::move(cols)),
        values_(std::move(values)),
        diagonal_(std::move(diagonal)) {}

  std::size_t size() const { return diagonal_.size(); }
  const std::vector<std::size_t>& offsets() const { return offsets_; }
  const std::vector<NodeId>& cols() const { return cols_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& diagonal() const { return diagonal_; }

  Matrix Apply(const Matrix& x) const;
  // Applies the transpose.
  Matrix ApplyTransposed(const Matrix& x) const;
  Matrix Dense() const;
  double RowSum(NodeId i) const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> cols_;
  std::vector<double> values_;
  std::vector<double> diagonal_;
};

// D_M^{-1} (M .* A). Isolated nodes get an identity row.
SparseOperator PropagationOperator(const SparseGraph& g, const EdgeMask& mask);
SparseOperator PropagationOperator(const SparseGraph& g, std::span<const double> weights);

// D~^{-1/2} (M .* A + I) D~^{-1/2}.
SparseOperator GcnOperator(const SparseGraph& g, const EdgeMask& mask);
SparseOperator GcnOperator(const SparseGraph& g, std::span<const double> weights);

// Fraction of edges joining differently labeled endpoints.
double HeterophilyRatio(const SparseGraph& g);

// Replaces random edges of the over-represented kind (homophilic or
// heterophilic) with random absent pairs of the other kind until the
// heterophilic edge count equals round(target_h * |E|). Edge count is
// preserved. Throws GraphError when the target needs more pairs of one
// kind than the node labels allow.
SparseGraph RewireToHeterophily(const SparseGraph& g, double target_h,
                                std::uint64_t seed);

}  // namespace gpl

#endif  // GPL_GRAPH_HPP_
