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

// Command-line front end: synth, rewire, train, estimate-prior, sweep,
// validate.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "gpl/app.hpp"
#include "gpl/validation.hpp"

namespace fs = std::filesystem;

namespace {

gpl::Config LoadOrEmpty(const std::string& path) {
  if (path.empty()) {
    std::istringstream none;
    return gpl::Config::Parse(none, "<defaults>");
  }
  return gpl::Config::Load(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph PU learning with label propagation loss"};
  app.require_subcommand(1);

  std::string config_path, out_dir;

  auto* synth = app.add_subcommand("synth", "generate a planted two-block dataset");
  synth->add_option("-c,--config", config_path, "key = value file (planted generator keys)");
  synth->add_option("-o,--out", out_dir, "output dataset directory")->required();

  std::string dataset;
  double target_h = 0.5;
  unsigned long long rewire_seed = 0;
  auto* rewire = app.add_subcommand("rewire", "rewire a dataset to a target heterophily ratio");
  rewire->add_option("-d,--dataset", dataset, "input dataset directory")->required();
  rewire->add_option("--target-h", target_h, "target heterophily ratio")->required();
  rewire->add_option("--seed", rewire_seed, "random seed");
  rewire->add_option("-o,--out", out_dir, "output dataset directory")->required();

  std::string method_name;
  std::optional<double> rp;
  auto* train = app.add_subcommand("train", "train GPL or the unit-structure baseline");
  train->add_option("-c,--config", config_path, "key = value file; 'dataset' is required")
      ->required();
  train->add_option("--method", method_name, "gpl or baseline (overrides config)");
  train->add_option("--rp", rp, "fraction of positives observed (overrides config)");
  train->add_option("-o,--out", out_dir, "output directory")->required();

  std::string scores_p, scores_u, curve_path;
  double min_support = gpl::CpeOptions{}.min_support;
  auto* estimate = app.add_subcommand("estimate-prior", "estimate the class prior from scores");
  estimate->add_option("--positive", scores_p, "scores of labeled positives, one per line")
      ->required();
  estimate->add_option("--unlabeled", scores_u, "scores of unlabeled nodes, one per line")
      ->required();
  estimate->add_option("--curve", curve_path, "write the ratio curve as CSV");
  estimate->add_option("--min-support", min_support, "minimum positive support per threshold");

  std::string sweep_out;
  auto* sweep = app.add_subcommand("sweep", "repeat training over a variable and seeds");
  sweep->add_option("-c,--config", config_path, "key = value file; 'variable' and 'values' required")
      ->required();
  sweep->add_option("-o,--out", sweep_out, "CSV output (default stdout)");

  std::string validate_out;
  auto* validate = app.add_subcommand("validate", "run the oracle suite");
  validate->add_option("-o,--out", validate_out, "CSV output (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      gpl::CmdSynth(LoadOrEmpty(config_path), out_dir);
      fmt::print("wrote {}\n", out_dir);
    } else if (*rewire) {
      gpl::CmdRewire(dataset, target_h, rewire_seed, out_dir);
      fmt::print("wrote {}\n", out_dir);
    } else if (*train) {
      std::optional<gpl::Method> method;
      if (!method_name.empty()) method = gpl::ParseMethod(method_name);
      const gpl::TrainSummary s = gpl::CmdTrain(gpl::Config::Load(config_path), method, rp, out_dir);
      std::cout << gpl::SummaryJson(s);
    } else if (*estimate) {
      gpl::CpeOptions options;
      options.min_support = min_support;
      const gpl::PriorEstimate est = gpl::CmdEstimatePrior(scores_p, scores_u, curve_path, options);
      fmt::print("pi_hat={:.17g}\nc_star={:.17g}\n", est.pi_hat, est.c_star);
    } else if (*sweep) {
      const auto rows = gpl::RunSweep(gpl::Config::Load(config_path), gpl::SweepThreadsFromEnv());
      if (sweep_out.empty()) {
        gpl::WriteSweepCsv(std::cout, rows);
      } else {
        std::ofstream f(sweep_out);
        if (!f) throw std::runtime_error("cannot write " + sweep_out);
        gpl::WriteSweepCsv(f, rows);
      }
    } else if (*validate) {
      const auto checks = gpl::RunOracleSuite();
      bool ok = true;
      for (const auto& c : checks) ok = ok && c.passed;
      if (validate_out.empty()) {
        gpl::WriteOracleCsv(std::cout, checks);
      } else {
        std::ofstream f(validate_out);
        if (!f) throw std::runtime_error("cannot write " + validate_out);
        gpl::WriteOracleCsv(f, checks);
      }
      if (!ok) {
        for (const auto& c : checks) {
          if (!c.passed) {
            fmt::print(stderr, "failed: {} (worst {:.3e}, tolerance {:.1e})\n", c.name, c.worst,
                       c.tolerance);
          }
        }
        return 1;
      }
    }
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
