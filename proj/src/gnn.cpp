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

#include "gpl/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace gpl {

ClassifierParams ClassifierParams::Zero(Eigen::Index d, Eigen::Index h) {
  ClassifierParams p;
  p.w1 = Matrix::Zero(d, h);
  p.b1 = Vector::Zero(h);
  p.w2 = Vector::Zero(h);
  p.b2 = 0.0;
  return p;
}

std::size_t ClassifierParams::size() const {
  return static_cast<std::size_t>(w1.size() + b1.size() + w2.size() + 1);
}

// Order: w1 (column-major), b1, w2, b2.
std::vector<double> ClassifierParams::Flatten() const {
  std::vector<double> flat;
  flat.reserve(size());
  flat.insert(flat.end(), w1.data(), w1.data() + w1.size());
  flat.insert(flat.end(), b1.data(), b1.data() + b1.size());
  flat.insert(flat.end(), w2.data(), w2.data() + w2.size());
  flat.push_back(b2);
  return flat;
}

void ClassifierParams::Assign(std::span<const double> flat) {
  if (flat.size() != size()) throw std::invalid_argument("flat parameter size mismatch");
  auto it = flat.begin();
  std::copy_n(it, w1.size(), w1.data());
  it += w1.size();
  std::copy_n(it, b1.size(), b1.data());
  it += b1.size();
  std::copy_n(it, w2.size(), w2.data());
  it += w2.size();
  b2 = *it;
}

bool ClassifierParams::AllFinite() const {
  return w1.allFinite() && b1.allFinite() && w2.allFinite() && std::isfinite(b2);
}

ClassifierState ClassifierState::Init(Eigen::Index input_dim, Eigen::Index hidden,
                                      std::uint64_t seed) {
  if (input_dim < 1 || hidden < 1) throw std::invalid_argument("classifier dims must be >= 1");
  std::mt19937_64 rng(seed);
  ClassifierParams p = ClassifierParams::Zero(input_dim, hidden);
  const double r1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
  std::uniform_real_distribution<double> u1(-r1, r1);
  for (Eigen::Index i = 0; i < input_dim; ++i)
    for (Eigen::Index j = 0; j < hidden; ++j) p.w1(i, j) = u1(rng);
  const double r2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  std::uniform_real_distribution<double> u2(-r2, r2);
  for (Eigen::Index j = 0; j < hidden; ++j) p.w2(j) = u2(rng);
  return FromParams(std::move(p));
}

ClassifierState ClassifierState::FromParams(ClassifierParams params) {
  ClassifierState s;
  s.m = ClassifierParams::Zero(params.input_dim(), params.hidden_dim());
  s.v = s.m;
  s.params = std::move(params);
  return s;
}

namespace {

struct ForwardCache {
  Matrix sx;       // S X
  Matrix pre;      // S X W1 + b1
  Matrix hidden;   // relu(pre)
  Matrix sh;       // S hidden
  Vector z;
};

ForwardCache RunForward(const ClassifierParams& p, const SparseOperator& s, const Matrix& x) {
  if (x.cols() != p.input_dim()) {
    throw std::invalid_argument(fmt::format("features have {} columns, classifier expects {}",
                                            x.cols(), p.input_dim()));
  }
  if (static_cast<std::size_t>(x.rows()) != s.size()) {
    throw std::invalid_argument("feature rows do not match operator size");
  }
  ForwardCache c;
  c.sx = s.Apply(x);
  c.pre = (c.sx * p.w1).rowwise() + p.b1.transpose();
  c.hidden = c.pre.cwiseMax(0.0);
  c.sh = s.Apply(c.hidden);
  const Vector logits = (c.sh * p.w2).array() + p.b2;
  c.z = logits.unaryExpr([](double t) { return Logistic(t); });
  return c;
}

struct Groups {
  std::vector<NodeId> pos;
  std::vector<NodeId> neg;
};

Groups MakeGroups(const PUSplit& split, const SelectionResult& sel, std::size_t n) {
  std::vector<char> in_u(n, 0);
  for (NodeId i : split.unlabeled) {
    if (i >= n) throw std::invalid_argument("unlabeled node out of range");
    in_u[i] = 1;
  }
  for (NodeId i : sel.selected) {
    if (i >= n || in_u[i] != 1) {
      throw std::invalid_argument(fmt::format("selected node {} is not unlabeled", i));
    }
  }
  for (NodeId i : sel.rest) {
    if (i >= n || in_u[i] != 1) {
      throw std::invalid_argument(fmt::format("provisional negative {} is not unlabeled", i));
    }
  }
  Groups g;
  g.pos = split.positives;
  g.pos.insert(g.pos.end(), sel.selected.begin(), sel.selected.end());
  g.neg = sel.rest;
  if (g.pos.empty() && g.neg.empty()) throw std::invalid_argument("both loss groups are empty");
  return g;
}

double GroupLoss(const Vector& z, const Groups& g) {
  double loss = 0.0;
  if (!g.pos.empty()) {
    double s = 0.0;
    for (NodeId i : g.pos) s -= std::log(z(i) + kBceFloor);
    loss += s / static_cast<double>(g.pos.size());
  }
  if (!g.neg.empty()) {
    double s = 0.0;
    for (NodeId i : g.neg) s -= std::log(1.0 - z(i) + kBceFloor);
    loss += s / static_cast<double>(g.neg.size());
  }
  return loss;
}

}  // namespace

Vector Forward(const ClassifierParams& p, const SparseOperator& s, const Matrix& x) {
  return RunForward(p, s, x).z;
}

SelectionResult SelectTop(std::span<const NodeId> unlabeled, const Vector& scores,
                          double pi_hat) {
  if (!(pi_hat >= 0.0 && pi_hat <= 1.0)) {
    throw std::invalid_argument(fmt::format("pi_hat {} outside [0, 1]", pi_hat));
  }
  std::vector<NodeId> order(unlabeled.begin(), unlabeled.end());
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    if (scores(a) != scores(b)) return scores(a) > scores(b);
    return a < b;
  });
  // Half-up rounding.
  const auto take = std::min<std::size_t>(
      order.size(),
      static_cast<std::size_t>(std::floor(pi_hat * static_cast<double>(order.size()) + 0.5)));
  SelectionResult r;
  r.selected.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take));
  r.rest.assign(order.begin() + static_cast<std::ptrdiff_t>(take), order.end());
  std::sort(r.selected.begin(), r.selected.end());
  std::sort(r.rest.begin(), r.rest.end());
  return r;
}

SelectionResult SelectNone(std::span<const NodeId> unlabeled) {
  SelectionResult r;
  r.rest.assign(unlabeled.begin(), unlabeled.end());
  std::sort(r.rest.begin(), r.rest.end());
  return r;
}

double PuLoss(const Vector& z, const PUSplit& split, const SelectionResult& sel) {
  return GroupLoss(z, MakeGroups(split, sel, static_cast<std::size_t>(z.size())));
}

LossGradient PuLossGradient(const ClassifierParams& p, const SparseOperator& s,
                            const Matrix& x, const PUSplit& split,
                            const SelectionResult& sel) {
  const ForwardCache c = RunForward(p, s, x);
  const Groups groups = MakeGroups(split, sel, static_cast<std::size_t>(c.z.size()));

  LossGradient out;
  out.loss = GroupLoss(c.z, groups);

  Vector d_logit = Vector::Zero(c.z.size());
  if (!groups.pos.empty()) {
    const double w = 1.0 / static_cast<double>(groups.pos.size());
    for (NodeId i : groups.pos) {
      const double z = c.z(i);
      d_logit(i) -= w * z * (1.0 - z) / (z + kBceFloor);
    }
  }
  if (!groups.neg.empty()) {
    const double w = 1.0 / static_cast<double>(groups.neg.size());
    for (NodeId i : groups.neg) {
      const double z = c.z(i);
      d_logit(i) += w * z * (1.0 - z) / (1.0 - z + kBceFloor);
    }
  }

  ClassifierParams& g = out.grad;
  g.w2 = c.sh.transpose() * d_logit;
  g.b2 = d_logit.sum();
  const Matrix d_sh = d_logit * p.w2.transpose();
  Matrix d_pre = s.ApplyTransposed(d_sh);
  d_pre = d_pre.cwiseProduct((c.pre.array() > 0.0).cast<double>().matrix());
  g.w1 = c.sx.transpose() * d_pre;
  g.b1 = d_pre.colwise().sum().transpose();
  return out;
}

namespace {

template <typename T>
void AdamUpdate(T& param, T& m, T& v, const T& grad, double lr, const AdamConfig& a,
                double bc1, double bc2) {
  m = a.beta1 * m + (1.0 - a.beta1) * grad;
  v = a.beta2 * v + (1.0 - a.beta2) * grad.cwiseProduct(grad);
  const auto m_hat = m / bc1;
  const auto v_hat = v / bc2;
  param -= (lr * m_hat.array() / (v_hat.array().sqrt() + a.eps)).matrix();
}

}  // namespace

double BackwardAndStep(ClassifierState& state, const SparseOperator& s, const Matrix& x,
                       const PUSplit& split, const SelectionResult& sel, double lr,
                       const AdamConfig& adam) {
  if (!(lr >= 0.0)) throw std::invalid_argument("classifier learning rate must be >= 0");
  const LossGradient lg = PuLossGradient(state.params, s, x, split, sel);
  if (!std::isfinite(lg.loss) || !lg.grad.AllFinite()) {
    throw std::runtime_error("non-finite classifier loss");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(adam.beta1, t);
  const double bc2 = 1.0 - std::pow(adam.beta2, t);
  AdamUpdate(state.params.w1, state.m.w1, state.v.w1, lg.grad.w1, lr, adam, bc1, bc2);
  AdamUpdate(state.params.b1, state.m.b1, state.v.b1, lg.grad.b1, lr, adam, bc1, bc2);
  AdamUpdate(state.params.w2, state.m.w2, state.v.w2, lg.grad.w2, lr, adam, bc1, bc2);
  state.m.b2 = adam.beta1 * state.m.b2 + (1.0 - adam.beta1) * lg.grad.b2;
  state.v.b2 = adam.beta2 * state.v.b2 + (1.0 - adam.beta2) * lg.grad.b2 * lg.grad.b2;
  state.params.b2 -= lr * (state.m.b2 / bc1) / (std::sqrt(state.v.b2 / bc2) + adam.eps);
  return lg.loss;
}

std::vector<int> PredictLabels(const Vector& z, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("threshold must lie in (0, 1)");
  }
  std::vector<int> out(static_cast<std::size_t>(z.size()));
  for (Eigen::Index i = 0; i < z.size(); ++i) out[i] = z(i) >= threshold ? 1 : -1;
  return out;
}

namespace {

void WriteBlock(std::ostream& out, const char* name, const Matrix& m) {
  fmt::print(out, "{} {} {}\n", name, m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      fmt::print(out, "{}{:.17g}", j == 0 ? "" : " ", m(i, j));
    }
    out << '\n';
  }
}

Matrix ReadBlock(std::istream& in, const std::string& expected) {
  std::string name;
  Eigen::Index rows = 0, cols = 0;
  if (!(in >> name >> rows >> cols) || name != expected || rows < 0 || cols < 0) {
    throw std::runtime_error(fmt::format("checkpoint: expected block '{}'", expected));
  }
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      if (!(in >> m(i, j))) {
        throw std::runtime_error(fmt::format("checkpoint: truncated block '{}'", expected));
      }
  return m;
}

}  // namespace

void SaveCheckpoint(std::ostream& out, const ClassifierParams& p) {
  out << "gpl-classifier 1\n";
  WriteBlock(out, "w1", p.w1);
  WriteBlock(out, "b1", p.b1.transpose());
  WriteBlock(out, "w2", p.w2);
  WriteBlock(out, "b2", Matrix::Constant(1, 1, p.b2));
}

ClassifierParams LoadCheckpoint(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "gpl-classifier" || version != 1) {
    throw std::runtime_error("checkpoint: bad header");
  }
  ClassifierParams p;
  p.w1 = ReadBlock(in, "w1");
  const Matrix b1 = ReadBlock(in, "b1");
  const Matrix w2 = ReadBlock(in, "w2");
  const Matrix b2 = ReadBlock(in, "b2");
  if (b1.rows() != 1 || b1.cols() != p.w1.cols() || w2.rows() != p.w1.cols() ||
      w2.cols() != 1 || b2.size() != 1) {
    throw std::runtime_error("checkpoint: inconsistent shapes");
  }
  p.b1 = b1.row(0).transpose();
  p.w2 = w2.col(0);
  p.b2 = b2(0, 0);
  return p;
}

}  // namespace gpl
