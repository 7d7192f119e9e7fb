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

#ifndef GPL_GNN_HPP_
#define GPL_GNN_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "gpl/graph.hpp"
#include "gpl/split.hpp"

namespace gpl {

inline constexpr int kDefaultHidden = 16;

// z = logistic(S relu(S X W1 + b1) W2 + b2)
struct ClassifierParams {
  Matrix w1;  // D x H
  Vector b1;  // H
  Vector w2;  // H
  double b2 = 0.0;

  static ClassifierParams Zero(Eigen::Index d, Eigen::Index h);
  Eigen::Index input_dim() const { return w1.rows(); }
  Eigen::Index hidden_dim() const { return w1.cols(); }

  std::size_t size() const;
  std::vector<double> Flatten() const;
  void Assign(std::span<const double> flat);
  bool AllFinite() const;
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct ClassifierState {
  ClassifierParams params;
  ClassifierParams m;
  ClassifierParams v;
  std::int64_t step = 0;

  // Weights uniform in +-1/sqrt(fan_in), biases zero.
  static ClassifierState Init(Eigen::Index input_dim, Eigen::Index hidden, std::uint64_t seed);
  static ClassifierState FromParams(ClassifierParams params);
};

Vector Forward(const ClassifierParams& p, const SparseOperator& s, const Matrix& x);

struct SelectionResult {
  std::vector<NodeId> selected;  // provisional positives, sorted
  std::vector<NodeId> rest;      // provisional negatives, sorted
};

// The round(pi_hat * |U|) highest-scored unlabeled nodes (ties by lower
// index). `scores` is indexed by node id.
SelectionResult SelectTop(std::span<const NodeId> unlabeled, const Vector& scores,
                          double pi_hat);

// Everything unlabeled is a provisional negative.
SelectionResult SelectNone(std::span<const NodeId> unlabeled);

inline constexpr double kBceFloor = 1e-12;

// Mean BCE(+1) over P u S plus mean BCE(-1) over U \ S.
double PuLoss(const Vector& z, const PUSplit& split, const SelectionResult& sel);

struct LossGradient {
  double loss = 0.0;
  ClassifierParams grad;
};

LossGradient PuLossGradient(const ClassifierParams& p, const SparseOperator& s,
                            const Matrix& x, const PUSplit& split,
                            const SelectionResult& sel);

// One Adam update on the PU loss. Returns the loss before the update.
double BackwardAndStep(ClassifierState& state, const SparseOperator& s, const Matrix& x,
                       const PUSplit& split, const SelectionResult& sel, double lr,
                       const AdamConfig& adam = {});

std::vector<int> PredictLabels(const Vector& z, double threshold = 0.5);

// Text checkpoint: header line "gpl-classifier 1", then one block per
// parameter, "<name> <rows> <cols>" followed by rows of %.17g values.
void SaveCheckpoint(std::ostream& out, const ClassifierParams& p);
ClassifierParams LoadCheckpoint(std::istream& in);

}  // namespace gpl

#endif  // GPL_GNN_HPP_
