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

#ifndef GPL_TRAINER_HPP_
#define GPL_TRAINER_HPP_

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "gpl/cpe.hpp"
#include "gpl/gnn.hpp"
#include "gpl/graph.hpp"
#include "gpl/propagation.hpp"
#include "gpl/split.hpp"

namespace gpl {

enum class LrSchedule { kConstant, kInverseSqrt };

struct TrainConfig {
  int outer_epochs = 20;
  int k_prop = 10;
  int k_inner = 50;
  double alpha = 0.5;
  double lr_mask = 0.01;  // largest raw-parameter change per inner step
  double lr_clf = 0.01;
  int clf_steps_per_epoch = 20;
  int warmup_steps = 50;
  int hidden = kDefaultHidden;
  LrSchedule lr_schedule = LrSchedule::kConstant;
  CpeOptions cpe{.min_support = 50.0};
  std::uint64_t seed = 0;

  void Validate() const;
  PropagationConfig propagation() const { return {alpha, k_prop}; }
  double ClassifierRate(int epoch) const;  // epoch is 1-based
};

struct EpochRecord {
  int epoch = 0;
  double lpl_loss = 0.0;
  double pi_hat = 0.0;
  double clf_loss = 0.0;
  double f1 = 0.0;
  double mean_weight_homo = 0.0;
  double mean_weight_hetero = 0.0;
};

using TrainTrace = std::vector<EpochRecord>;

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GplResult {
  ClassifierState classifier;
  EdgeMask mask;
  PriorEstimate prior;
  TrainTrace trace;
  Vector scores;  // final posteriors on the learned structure
};

struct BaselineResult {
  ClassifierState classifier;
  PriorEstimate prior;  // CPE on the unit-weight structure
  TrainTrace trace;
  Vector scores;
};

struct MeanWeights {
  double homo = 0.0;
  double hetero = 0.0;
};

// Mean weight over homophilic and heterophilic edges; a class with no edges
// reports 0.
MeanWeights MeanMaskWeights(const SparseGraph& g, std::span<const double> weights);

// Prior estimate from a freshly initialized classifier after
// cfg.warmup_steps updates that treat all unlabeled nodes as negative, on
// the unit-weight structure.
PriorEstimate FirstEpochPrior(const SparseGraph& g, const PUSplit& split, const TrainConfig& cfg);

// Alternates LPL mask optimization, prior estimation, top-fraction
// selection and classifier updates for cfg.outer_epochs epochs.
GplResult RunGpl(const SparseGraph& g, const PUSplit& split, const TrainConfig& cfg);

// Same classifier and optimizer on unit edge weights with every unlabeled
// node labeled -1. Runs warmup_steps + outer_epochs * clf_steps_per_epoch
// updates; one trace record per outer epoch.
BaselineResult RunBaseline(const SparseGraph& g, const PUSplit& split, const TrainConfig& cfg);

// One CSV row per epoch with a fixed header.
void WriteTraceCsv(std::ostream& out, const TrainTrace& trace);

}  // namespace gpl

#endif  // GPL_TRAINER_HPP_
