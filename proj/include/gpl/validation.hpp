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

#ifndef GPL_VALIDATION_HPP_
#define GPL_VALIDATION_HPP_

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gpl/metrics.hpp"

namespace gpl {

struct OracleCheck {
  std::string name;
  int instances = 0;
  double worst = 0.0;      // largest residual / relative error / violation seen
  double tolerance = 0.0;
  bool passed = false;
};

// Broken on purpose: divides by the unmasked degree, so rows of the
// operator no longer sum to one once any weight drops below 1.
BeliefMatrix PropagateWithoutRenormalization(const SparseGraph& g, const EdgeMask& mask,
                                             const BeliefMatrix& e0, const PropagationConfig& cfg);

// Oracle suite with fixed internal seeds: gradients against central
// differences, row-stochasticity, a dense-matrix propagation oracle, the
// influence identity (finite differences and walk enumeration), the support
// condition on influence, D_PN contraction, and a mutation check that the
// influence identity rejects PropagateWithoutRenormalization.
std::vector<OracleCheck> RunOracleSuite();

void WriteOracleCsv(std::ostream& out, std::span<const OracleCheck> checks);

}  // namespace gpl

#endif  // GPL_VALIDATION_HPP_
