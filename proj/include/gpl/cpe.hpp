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

#ifndef GPL_CPE_HPP_
#define GPL_CPE_HPP_

#include <span>
#include <stdexcept>
#include <vector>

namespace gpl {

class CpeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fraction of scores >= c.
double EmpiricalQ(std::span<const double> scores, double c);

struct CurvePoint {
  double c = 0.0;
  double q_u = 0.0;
  double q_p = 0.0;
  double ratio = 0.0;
  bool admissible = false;
};

struct PriorEstimate {
  double pi_hat = 0.0;
  double c_star = 0.0;
  std::vector<CurvePoint> curve;  // ascending in c
};

// Thresholds whose positive support Q_p(c) falls below
//   min(max_floor, max(min_support / |P|, min_fraction))
// are not admissible. The raw minimum over thresholds is biased low when
// thin tails are admissible: on 2000-sample mixtures at pi = 0.5 a floor of
// 0.05 misses by more than 0.05 in about a third of seeds, 0.4 in about 1%.
struct CpeOptions {
  double min_support = 10.0;
  double min_fraction = 0.4;
  double max_floor = 0.5;

  double Floor(std::size_t num_positive) const;
};

// pi_hat = min over c in {0} U scores of Q_u(c) / Q_p(c), clipped to [0, 1].
// Ties go to the smallest c. Throws CpeError on empty inputs, scores outside
// [0, 1], or when no threshold is admissible.
PriorEstimate EstimatePrior(std::span<const double> scores_p,
                            std::span<const double> scores_u,
                            const CpeOptions& options = {});

double PriorError(double pi_hat, double pi_true);

}  // namespace gpl

#endif  // GPL_CPE_HPP_
