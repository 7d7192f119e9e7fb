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

#include "gpl/cpe.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace gpl {

namespace {

void CheckScores(std::span<const double> s, const char* name) {
  if (s.empty()) throw CpeError(fmt::format("{} score set is empty", name));
  for (double x : s) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw CpeError(fmt::format("{} score {} outside [0, 1]", name, x));
    }
  }
}

// Count of elements >= c in an ascending array.
std::size_t CountAtLeast(const std::vector<double>& sorted, double c) {
  return static_cast<std::size_t>(
      sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), c));
}

}  // namespace

double EmpiricalQ(std::span<const double> scores, double c) {
  if (scores.empty()) return 0.0;
  const auto hits = std::count_if(scores.begin(), scores.end(),
                                  [c](double s) { return s >= c; });
  return static_cast<double>(hits) / static_cast<double>(scores.size());
}

double CpeOptions::Floor(std::size_t num_positive) const {
  const double support = min_support / static_cast<double>(num_positive);
  return std::min(max_floor, std::max(support, min_fraction));
}

PriorEstimate EstimatePrior(std::span<const double> scores_p,
                            std::span<const double> scores_u,
                            const CpeOptions& options) {
  CheckScores(scores_p, "positive");
  CheckScores(scores_u, "unlabeled");

  std::vector<double> sp(scores_p.begin(), scores_p.end());
  std::vector<double> su(scores_u.begin(), scores_u.end());
  std::sort(sp.begin(), sp.end());
  std::sort(su.begin(), su.end());

  std::vector<double> candidates;
  candidates.reserve(sp.size() + su.size() + 1);
  candidates.push_back(0.0);
  candidates.insert(candidates.end(), sp.begin(), sp.end());
  candidates.insert(candidates.end(), su.begin(), su.end());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  const double floor = options.Floor(sp.size());
  const double np = static_cast<double>(sp.size());
  const double nu = static_cast<double>(su.size());

  PriorEstimate est;
  est.curve.reserve(candidates.size());
  bool found = false;
  double best = 0.0;
  double max_admissible = 0.0;
  for (double c : candidates) {
    CurvePoint pt;
    pt.c = c;
    pt.q_p = static_cast<double>(CountAtLeast(sp, c)) / np;
    pt.q_u = static_cast<double>(CountAtLeast(su, c)) / nu;
    pt.admissible = pt.q_p > 0.0 && pt.q_p >= floor;
    pt.ratio = pt.q_p > 0.0 ? pt.q_u / pt.q_p : INFINITY;
    if (pt.admissible) {
      max_admissible = c;
      if (!found || pt.ratio < best) {
        best = pt.ratio;
        est.c_star = c;
        found = true;
      }
    }
    est.curve.push_back(pt);
  }
  if (!found) {
    throw CpeError(fmt::format(
        "no admissible threshold: Q_p floor {:.4f} exceeds the positive support "
        "(max admissible c = {})",
        floor, max_admissible));
  }
  est.pi_hat = std::clamp(best, 0.0, 1.0);
  return est;
}

double PriorError(double pi_hat, double pi_true) { return std::abs(pi_hat - pi_true); }

}  // namespace gpl
