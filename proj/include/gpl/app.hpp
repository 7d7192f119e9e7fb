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

#ifndef GPL_APP_HPP_
#define GPL_APP_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gpl/cpe.hpp"
#include "gpl/synth.hpp"
#include "gpl/trainer.hpp"

namespace gpl {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat `key = value` file. '#' starts a comment; blank lines are ignored.
class Config {
 public:
  static Config Parse(std::istream& in, std::string source = "<config>");
  static Config Load(const std::filesystem::path& path);

  bool has(std::string_view key) const { return values_.contains(std::string(key)); }
  void Set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }
  const std::string& source() const { return source_; }

  // Throws ConfigError naming the key when it is absent.
  const std::string& Require(std::string_view key) const;

  std::string GetString(std::string_view key, std::string fallback) const;
  double GetDouble(std::string_view key, double fallback) const;
  long long GetInt(std::string_view key, long long fallback) const;
  std::vector<double> GetList(std::string_view key, std::vector<double> fallback) const;

  // Throws on any key outside `allowed`, so typos do not pass silently.
  void CheckKnown(std::span<const std::string_view> allowed) const;

 private:
  std::map<std::string, std::string, std::less<>> values_;
  std::map<std::string, int, std::less<>> lines_;
  std::string source_;
};

enum class Method { kGpl, kBaseline };
Method ParseMethod(std::string_view name);
std::string_view MethodName(Method m);

TrainConfig TrainConfigFrom(const Config& cfg);
PlantedConfig PlantedConfigFrom(const Config& cfg);

struct TrainSummary {
  double f1 = 0.0;
  double pi_hat = 0.0;
  double pi_true = 0.0;
  double prior_error = 0.0;
  double mean_weight_homo = 1.0;
  double mean_weight_hetero = 1.0;
  int epochs = 0;
  std::uint64_t seed = 0;
};

std::string SummaryJson(const TrainSummary& s);

struct TrainOutcome {
  TrainSummary summary;
  TrainTrace trace;
  ClassifierParams params;
};

TrainOutcome Train(const SparseGraph& g, const PUSplit& split, const TrainConfig& cfg,
                   Method method);

// Subcommands. Each writes its outputs under `out` (created if needed).
void CmdSynth(const Config& cfg, const std::filesystem::path& out);
void CmdRewire(const std::filesystem::path& dataset, double target_h, std::uint64_t seed,
               const std::filesystem::path& out);
TrainSummary CmdTrain(const Config& cfg, std::optional<Method> method, std::optional<double> r_p,
                      const std::filesystem::path& out);
PriorEstimate CmdEstimatePrior(const std::filesystem::path& scores_p,
                               const std::filesystem::path& scores_u,
                               const std::filesystem::path& curve_out,
                               const CpeOptions& options = {});

std::vector<double> ReadScores(const std::filesystem::path& path);
void WriteCurveCsv(std::ostream& out, const PriorEstimate& est);

struct SweepRow {
  bool aggregate = false;
  Method method = Method::kGpl;
  std::string variable;
  double value = 0.0;
  std::uint64_t seed = 0;  // unused for aggregate rows
  int runs = 1;
  double f1 = 0.0, f1_std = 0.0;
  double pi_hat = 0.0, pi_hat_std = 0.0;
  double prior_error = 0.0, prior_error_std = 0.0;
  double mean_weight_homo = 0.0, mean_weight_hetero = 0.0;
};

// One row per (method, value, seed) followed by mean and sample standard
// deviation per (method, value). `threads` workers share nothing mutable.
std::vector<SweepRow> RunSweep(const Config& cfg, int threads);
void WriteSweepCsv(std::ostream& out, std::span<const SweepRow> rows);

// GPL_THREADS, default 1.
int SweepThreadsFromEnv();

}  // namespace gpl

#endif  // GPL_APP_HPP_
