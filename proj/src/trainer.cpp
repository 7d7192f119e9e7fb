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

#include "gpl/trainer.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "gpl/metrics.hpp"

namespace gpl {

void TrainConfig::Validate() const {
  if (outer_epochs < 1) throw std::invalid_argument("outer_epochs must be >= 1");
  if (k_prop < 0) throw std::invalid_argument("k_prop must be >= 0");
  if (k_inner < 0) throw std::invalid_argument("k_inner must be >= 0");
  if (clf_steps_per_epoch < 0) throw std::invalid_argument("clf_steps_per_epoch must be >= 0");
  if (warmup_steps < 0) throw std::invalid_argument("warmup_steps must be >= 0");
  if (hidden < 1) throw std::invalid_argument("hidden must be >= 1");
  if (!(lr_mask >= 0.0)) throw std::invalid_argument("lr_mask must be >= 0");
  if (!(lr_clf >= 0.0)) throw std::invalid_argument("lr_clf must be >= 0");
  propagation().Validate();
}

double TrainConfig::ClassifierRate(int epoch) const {
  if (lr_schedule == LrSchedule::kInverseSqrt) return lr_clf / std::sqrt(static_cast<double>(epoch));
  return lr_clf;
}

MeanWeights MeanMaskWeights(const SparseGraph& g, std::span<const double> weights) {
  double homo = 0.0, hetero = 0.0;
  std::size_t nh = 0, nx = 0;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    if (g.is_heterophilic(e)) {
      hetero += weights[e];
      ++nx;
    } else {
      homo += weights[e];
      ++nh;
    }
  }
  return {nh ? homo / static_cast<double>(nh) : 0.0, nx ? hetero / static_cast<double>(nx) : 0.0};
}

namespace {

std::vector<double> Gather(const Vector& z, std::span<const NodeId> nodes) {
  std::vector<double> out;
  out.reserve(nodes.size());
  for (NodeId i : nodes) out.push_back(z(i));
  return out;
}

PriorEstimate PriorFromScores(const Vector& z, const PUSplit& split, const CpeOptions& options) {
  const auto sp = Gather(z, split.positives);
  const auto su = Gather(z, split.unlabeled);
  return EstimatePrior(sp, su, options);
}

double UnlabeledF1(const SparseGraph& g, const Vector& z, const PUSplit& split) {
  if (!g.has_labels() || split.unlabeled.empty()) return 0.0;
  return F1Score(PredictLabels(z), g.labels(), split.unlabeled);
}

void CheckFinite(const EpochRecord& r) {
  const double values[] = {r.lpl_loss, r.pi_hat, r.clf_loss, r.f1, r.mean_weight_homo,
                           r.mean_weight_hetero};
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw TrainingError(fmt::format("non-finite trace value at epoch {}", r.epoch));
    }
  }
}

struct Warm {
  ClassifierState state;
  PriorEstimate prior;
  Vector scores;
};

Warm Warmup(const SparseGraph& g, const PUSplit& split, const TrainConfig& cfg,
            const SparseOperator& unit_op) {
  Warm w{ClassifierState::Init(g.features().cols(), cfg.hidden, cfg.seed), {}, {}};
  const SelectionResult all_negative = SelectNone(split.unlabeled);
  for (int s = 0; s < cfg.warmup_steps; ++s) {
    BackwardAndStep(w.state, unit_op, g.features(), split, all_negative, cfg.lr_clf);
  }
  w.scores = Forward(w.state.params, unit_op, g.features());
  w.prior = PriorFromScores(w.scores, split, cfg.cpe);
  return w;
}

void CheckInputs(const SparseGraph& g, const PUSplit& split, const TrainConfig& cfg) {
  cfg.Validate();
  if (g.num_nodes() == 0) throw std::invalid_argument("empty graph");
  ValidateSplit(split, g.num_nodes());
  if (split.positives.empty()) throw std::invalid_argument("split has no observed positives");
  if (split.unlabeled.empty()) throw std::invalid_argument("split has no unlabeled nodes");
}

}  // namespace

PriorEstimate FirstEpochPrior(const SparseGraph& g, const PUSplit& split, const TrainConfig& cfg) {
  CheckInputs(g, split, cfg);
  const std::vector<double> unit(g.num_edges(), 1.0);
  return Warmup(g, split, cfg, GcnOperator(g, unit)).prior;
}

GplResult RunGpl(const SparseGraph& g, const PUSplit& split, const TrainConfig& cfg) {
  CheckInputs(g, split, cfg);
  const Matrix& x = g.features();
  const std::vector<double> unit(g.num_edges(), 1.0);
  Warm warm = Warmup(g, split, cfg, GcnOperator(g, unit));

  GplResult result;
  result.classifier = std::move(warm.state);
  result.prior = warm.prior;
  result.mask = EdgeMask(g.num_edges());
  SelectionResult sel = SelectTop(split.unlabeled, warm.scores, warm.prior.pi_hat);
  const PropagationConfig prop = cfg.propagation();

  for (int epoch = 1; epoch <= cfg.outer_epochs; ++epoch) {
    EpochRecord rec;
    rec.epoch = epoch;

    // Inner problem: fit edge weights to the observed and identified labels.
    const BeliefMatrix e0 = InitBeliefs(split, sel.selected, sel.rest);
    std::vector<NodeId> lpl_pos = split.positives;
    lpl_pos.insert(lpl_pos.end(), sel.selected.begin(), sel.selected.end());
    const MaskOptimizationResult inner =
        OptimizeMask(g, result.mask, e0, prop, lpl_pos, sel.rest, cfg.k_inner, cfg.lr_mask);
    result.mask = inner.mask;
    rec.lpl_loss = inner.final_loss;

    // Outer problem on the learned structure.
    const SparseOperator op = GcnOperator(g, result.mask);
    const Vector z = Forward(result.classifier.params, op, x);
    result.prior = PriorFromScores(z, split, cfg.cpe);
    rec.pi_hat = result.prior.pi_hat;
    sel = SelectTop(split.unlabeled, z, result.prior.pi_hat);

    const double lr = cfg.ClassifierRate(epoch);
    double loss = PuLoss(z, split, sel);
    for (int s = 0; s < cfg.clf_steps_per_epoch; ++s) {
      loss = BackwardAndStep(result.classifier, op, x, split, sel, lr);
    }
    rec.clf_loss = loss;

    result.scores = Forward(result.classifier.params, op, x);
    rec.f1 = UnlabeledF1(g, result.scores, split);
    if (g.has_labels()) {
      const MeanWeights mw = MeanMaskWeights(g, result.mask.weights());
      rec.mean_weight_homo = mw.homo;
      rec.mean_weight_hetero = mw.hetero;
    }
    CheckFinite(rec);
    result.trace.push_back(rec);
  }
  return result;
}

BaselineResult RunBaseline(const SparseGraph& g, const PUSplit& split, const TrainConfig& cfg) {
  CheckInputs(g, split, cfg);
  const Matrix& x = g.features();
  const std::vector<double> unit(g.num_edges(), 1.0);
  const SparseOperator op = GcnOperator(g, unit);
  Warm warm = Warmup(g, split, cfg, op);

  // The fixed unit structure's LPL against the observed positives only.
  const BeliefMatrix e0 = InitBeliefs(split);
  const double lpl =
      LplLoss(Propagate(PropagationOperator(g, unit), e0, cfg.propagation()), split.positives, {});

  BaselineResult result;
  result.classifier = std::move(warm.state);
  const SelectionResult all_negative = SelectNone(split.unlabeled);
  for (int epoch = 1; epoch <= cfg.outer_epochs; ++epoch) {
    EpochRecord rec;
    rec.epoch = epoch;
    rec.lpl_loss = lpl;
    const double lr = cfg.ClassifierRate(epoch);
    double loss = PuLoss(Forward(result.classifier.params, op, x), split, all_negative);
    for (int s = 0; s < cfg.clf_steps_per_epoch; ++s) {
      loss = BackwardAndStep(result.classifier, op, x, split, all_negative, lr);
    }
    rec.clf_loss = loss;
    result.scores = Forward(result.classifier.params, op, x);
    result.prior = PriorFromScores(result.scores, split, cfg.cpe);
    rec.pi_hat = result.prior.pi_hat;
    rec.f1 = UnlabeledF1(g, result.scores, split);
    rec.mean_weight_homo = 1.0;
    rec.mean_weight_hetero = 1.0;
    CheckFinite(rec);
    result.trace.push_back(rec);
  }
  return result;
}

void WriteTraceCsv(std::ostream& out, const TrainTrace& trace) {
  out << "epoch,lpl_loss,pi_hat,clf_loss,f1,mean_weight_homo,mean_weight_hetero\n";
  for (const EpochRecord& r : trace) {
    fmt::print(out, "{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.epoch, r.lpl_loss,
               r.pi_hat, r.clf_loss, r.f1, r.mean_weight_homo, r.mean_weight_hetero);
  }
}

}  // namespace gpl
