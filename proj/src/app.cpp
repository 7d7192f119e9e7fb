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

#include "gpl/app.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <json.hpp>

namespace gpl {
namespace fs = std::filesystem;

namespace {

std::string_view Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double ParseDouble(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError(fmt::format("{}: '{}' is not a number", what, text));
  }
  return v;
}

std::ofstream OpenOutput(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  return out;
}

void EnsureDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
}

constexpr std::string_view kTrainKeys[] = {
    "outer_epochs", "k_prop",      "k_inner", "alpha",  "lr_mask",
    "lr_clf",       "clf_steps_per_epoch",    "warmup_steps", "hidden",
    "lr_schedule",  "cpe_min_support",        "seed"};
constexpr std::string_view kPlantedKeys[] = {"n",           "pi_p",        "h",
                                             "avg_degree",  "feature_dim", "feature_separation",
                                             "seed"};

std::vector<std::string_view> Keys(std::initializer_list<std::span<const std::string_view>> groups,
                                   std::initializer_list<std::string_view> extra) {
  std::vector<std::string_view> out(extra);
  for (auto g : groups) out.insert(out.end(), g.begin(), g.end());
  return out;
}

}  // namespace

// ---- Config ----

Config Config::Parse(std::istream& in, std::string source) {
  Config cfg;
  cfg.source_ = std::move(source);
  std::string raw;
  for (int ln = 1; std::getline(in, raw); ++ln) {
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("{}:{}: expected 'key = value'", cfg.source_, ln));
    }
    const std::string key(Trim(line.substr(0, eq)));
    const std::string value(Trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(fmt::format("{}:{}: empty key", cfg.source_, ln));
    if (cfg.values_.contains(key)) {
      throw ConfigError(fmt::format("{}:{}: duplicate key '{}'", cfg.source_, ln, key));
    }
    cfg.values_[key] = value;
    cfg.lines_[key] = ln;
  }
  return cfg;
}

Config Config::Load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config {}", path.string()));
  return Parse(in, path.string());
}

const std::string& Config::Require(std::string_view key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw ConfigError(fmt::format("{}: missing required key '{}'", source_, key));
  }
  return it->second;
}

std::string Config::GetString(std::string_view key, std::string fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::GetDouble(std::string_view key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  return ParseDouble(it->second, fmt::format("{}: key '{}'", source_, key));
}

long long Config::GetInt(std::string_view key, long long fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  long long v = 0;
  const std::string& s = it->second;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ConfigError(fmt::format("{}: key '{}': '{}' is not an integer", source_, key, s));
  }
  return v;
}

std::vector<double> Config::GetList(std::string_view key, std::vector<double> fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  std::string_view rest = it->second;
  while (true) {
    const auto comma = rest.find(',');
    const auto item = Trim(rest.substr(0, comma));
    if (item.empty()) throw ConfigError(fmt::format("{}: key '{}': empty list item", source_, key));
    out.push_back(ParseDouble(item, fmt::format("{}: key '{}'", source_, key)));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

void Config::CheckKnown(std::span<const std::string_view> allowed) const {
  for (const auto& [key, value] : values_) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(
          fmt::format("{}:{}: unknown key '{}'", source_, lines_.find(key)->second, key));
    }
  }
}

// ---- conversions ----

Method ParseMethod(std::string_view name) {
  if (name == "gpl") return Method::kGpl;
  if (name == "baseline") return Method::kBaseline;
  throw ConfigError(fmt::format("unknown method '{}' (expected gpl or baseline)", name));
}

std::string_view MethodName(Method m) { return m == Method::kGpl ? "gpl" : "baseline"; }

TrainConfig TrainConfigFrom(const Config& cfg) {
  TrainConfig tc;
  tc.outer_epochs = static_cast<int>(cfg.GetInt("outer_epochs", tc.outer_epochs));
  tc.k_prop = static_cast<int>(cfg.GetInt("k_prop", tc.k_prop));
  tc.k_inner = static_cast<int>(cfg.GetInt("k_inner", tc.k_inner));
  tc.alpha = cfg.GetDouble("alpha", tc.alpha);
  tc.lr_mask = cfg.GetDouble("lr_mask", tc.lr_mask);
  tc.lr_clf = cfg.GetDouble("lr_clf", tc.lr_clf);
  tc.clf_steps_per_epoch =
      static_cast<int>(cfg.GetInt("clf_steps_per_epoch", tc.clf_steps_per_epoch));
  tc.warmup_steps = static_cast<int>(cfg.GetInt("warmup_steps", tc.warmup_steps));
  tc.hidden = static_cast<int>(cfg.GetInt("hidden", tc.hidden));
  tc.cpe.min_support = cfg.GetDouble("cpe_min_support", tc.cpe.min_support);
  const std::string schedule = cfg.GetString("lr_schedule", "constant");
  if (schedule == "constant") {
    tc.lr_schedule = LrSchedule::kConstant;
  } else if (schedule == "inverse_sqrt") {
    tc.lr_schedule = LrSchedule::kInverseSqrt;
  } else {
    throw ConfigError(fmt::format("{}: key 'lr_schedule': '{}' is not constant or inverse_sqrt",
                                  cfg.source(), schedule));
  }
  const long long seed = cfg.GetInt("seed", 0);
  if (seed < 0) throw ConfigError(fmt::format("{}: key 'seed' must be >= 0", cfg.source()));
  tc.seed = static_cast<std::uint64_t>(seed);
  tc.Validate();
  return tc;
}

PlantedConfig PlantedConfigFrom(const Config& cfg) {
  PlantedConfig pc;
  const long long n = cfg.GetInt("n", static_cast<long long>(pc.n));
  const long long d = cfg.GetInt("feature_dim", static_cast<long long>(pc.feature_dim));
  const long long seed = cfg.GetInt("seed", 0);
  if (n < 1 || d < 1 || seed < 0) {
    throw ConfigError(fmt::format("{}: n and feature_dim must be >= 1, seed >= 0", cfg.source()));
  }
  pc.n = static_cast<std::size_t>(n);
  pc.feature_dim = static_cast<std::size_t>(d);
  pc.seed = static_cast<std::uint64_t>(seed);
  pc.pi_p = cfg.GetDouble("pi_p", pc.pi_p);
  pc.h = cfg.GetDouble("h", pc.h);
  pc.avg_degree = cfg.GetDouble("avg_degree", pc.avg_degree);
  pc.feature_separation = cfg.GetDouble("feature_separation", pc.feature_separation);
  pc.Validate();
  return pc;
}

std::string SummaryJson(const TrainSummary& s) {
  nlohmann::ordered_json j;
  j["f1"] = s.f1;
  j["pi_hat"] = s.pi_hat;
  j["pi_true"] = s.pi_true;
  j["prior_error"] = s.prior_error;
  j["mean_weight_homo"] = s.mean_weight_homo;
  j["mean_weight_hetero"] = s.mean_weight_hetero;
  j["epochs"] = s.epochs;
  j["seed"] = s.seed;
  return j.dump(2) + "\n";
}

TrainOutcome Train(const SparseGraph& g, const PUSplit& split, const TrainConfig& cfg,
                   Method method) {
  TrainOutcome out;
  out.summary.pi_true = split.pi_true;
  out.summary.epochs = cfg.outer_epochs;
  out.summary.seed = cfg.seed;
  if (method == Method::kGpl) {
    GplResult r = RunGpl(g, split, cfg);
    out.trace = std::move(r.trace);
    out.params = std::move(r.classifier.params);
    out.summary.pi_hat = r.prior.pi_hat;
    if (g.has_labels()) {
      const MeanWeights mw = MeanMaskWeights(g, r.mask.weights());
      out.summary.mean_weight_homo = mw.homo;
      out.summary.mean_weight_hetero = mw.hetero;
    }
  } else {
    BaselineResult r = RunBaseline(g, split, cfg);
    out.trace = std::move(r.trace);
    out.params = std::move(r.classifier.params);
    out.summary.pi_hat = r.prior.pi_hat;
  }
  out.summary.f1 = out.trace.back().f1;
  out.summary.prior_error = PriorError(out.summary.pi_hat, split.pi_true);
  return out;
}

// ---- subcommands ----

void CmdSynth(const Config& cfg, const fs::path& out) {
  const auto allowed = Keys({kPlantedKeys}, {"h_values"});
  cfg.CheckKnown(allowed);
  PlantedConfig pc = PlantedConfigFrom(cfg);
  if (!cfg.has("h_values")) {
    SaveDataset(GeneratePlanted(pc), out);
    return;
  }
  for (double h : cfg.GetList("h_values", {})) {
    pc.h = h;
    pc.Validate();
    SaveDataset(GeneratePlanted(pc), out / fmt::format("h_{}", h));
  }
}

void CmdRewire(const fs::path& dataset, double target_h, std::uint64_t seed, const fs::path& out) {
  SaveDataset(RewireToHeterophily(LoadDataset(dataset), target_h, seed), out);
}

TrainSummary CmdTrain(const Config& cfg, std::optional<Method> method, std::optional<double> r_p,
                      const fs::path& out) {
  const auto allowed = Keys({kTrainKeys}, {"dataset", "r_p", "split_seed", "method"});
  cfg.CheckKnown(allowed);
  const fs::path dataset = cfg.Require("dataset");
  const TrainConfig tc = TrainConfigFrom(cfg);
  const Method m = method ? *method : ParseMethod(cfg.GetString("method", "gpl"));
  const double rp = r_p ? *r_p : cfg.GetDouble("r_p", 0.5);
  const long long split_seed = cfg.GetInt("split_seed", static_cast<long long>(tc.seed));
  if (split_seed < 0) throw ConfigError("split_seed must be >= 0");

  const SparseGraph g = LoadDataset(dataset);
  if (!g.has_labels()) throw ConfigError("dataset has no labels; a PU split needs them");
  const PUSplit split = MakePUSplit(g, rp, static_cast<std::uint64_t>(split_seed));
  const TrainOutcome result = Train(g, split, tc, m);

  EnsureDir(out);
  {
    auto f = OpenOutput(out / "trace.csv");
    WriteTraceCsv(f, result.trace);
  }
  {
    auto f = OpenOutput(out / "summary.json");
    f << SummaryJson(result.summary);
  }
  {
    auto f = OpenOutput(out / "model.txt");
    SaveCheckpoint(f, result.params);
  }
  return result.summary;
}

std::vector<double> ReadScores(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open {}", path.string()));
  std::vector<double> out;
  std::string raw;
  for (int ln = 1; std::getline(in, raw); ++ln) {
    const auto line = Trim(raw);
    if (line.empty()) continue;
    out.push_back(ParseDouble(line, fmt::format("{}:{}", path.string(), ln)));
  }
  return out;
}

void WriteCurveCsv(std::ostream& out, const PriorEstimate& est) {
  out << "c,q_u,q_p,ratio,admissible\n";
  for (const CurvePoint& p : est.curve) {
    fmt::print(out, "{:.17g},{:.17g},{:.17g},{:.17g},{}\n", p.c, p.q_u, p.q_p, p.ratio,
               p.admissible ? 1 : 0);
  }
}

PriorEstimate CmdEstimatePrior(const fs::path& scores_p, const fs::path& scores_u,
                               const fs::path& curve_out, const CpeOptions& options) {
  const auto sp = ReadScores(scores_p);
  const auto su = ReadScores(scores_u);
  PriorEstimate est = EstimatePrior(sp, su, options);
  if (!curve_out.empty()) {
    if (curve_out.has_parent_path()) EnsureDir(curve_out.parent_path());
    auto f = OpenOutput(curve_out);
    WriteCurveCsv(f, est);
  }
  return est;
}

// ---- sweep ----

namespace {

struct SweepJob {
  Method method;
  double value;
  std::uint64_t seed;
};

void MeanStd(const std::vector<double>& xs, double& mean, double& sd) {
  mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
}

}  // namespace

int SweepThreadsFromEnv() {
  const char* v = std::getenv("GPL_THREADS");
  if (v == nullptr || *v == '\0') return 1;
  int n = 0;
  const std::string_view s(v);
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (ec != std::errc() || p != s.data() + s.size() || n < 1) {
    throw ConfigError(fmt::format("GPL_THREADS must be a positive integer, got '{}'", s));
  }
  return n;
}

std::vector<SweepRow> RunSweep(const Config& cfg, int threads) {
  const auto allowed = Keys({kTrainKeys, kPlantedKeys},
                            {"variable", "values", "seeds", "methods", "dataset", "r_p"});
  cfg.CheckKnown(allowed);
  const std::string variable = cfg.Require("variable");
  if (variable != "h" && variable != "r_p" && variable != "k_prop") {
    throw ConfigError(fmt::format("{}: key 'variable' must be h, r_p or k_prop, got '{}'",
                                  cfg.source(), variable));
  }
  const std::vector<double> values = cfg.GetList("values", {});
  if (values.size() < 2) {
    throw ConfigError(fmt::format("{}: key 'values' needs at least two entries", cfg.source()));
  }
  const std::vector<double> seed_list = cfg.GetList("seeds", {0, 1, 2, 3, 4});
  std::vector<std::uint64_t> seeds;
  for (double s : seed_list) {
    if (s < 0 || s != std::floor(s)) throw ConfigError("seeds must be non-negative integers");
    const auto u = static_cast<std::uint64_t>(s);
    if (std::find(seeds.begin(), seeds.end(), u) != seeds.end()) {
      throw ConfigError(fmt::format("duplicate seed {}", u));
    }
    seeds.push_back(u);
  }
  std::vector<Method> methods;
  {
    const std::string spec = cfg.GetString("methods", "gpl,baseline");
    std::string_view rest = spec;
    while (true) {
      const auto comma = rest.find(',');
      methods.push_back(ParseMethod(Trim(rest.substr(0, comma))));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  }
  const TrainConfig base_train = TrainConfigFrom(cfg);
  const PlantedConfig base_planted = PlantedConfigFrom(cfg);
  const double base_rp = cfg.GetDouble("r_p", 0.5);
  std::optional<SparseGraph> dataset;
  if (cfg.has("dataset")) dataset = LoadDataset(cfg.Require("dataset"));

  std::vector<SweepJob> jobs;
  for (Method m : methods) {
    for (double v : values) {
      for (std::uint64_t s : seeds) jobs.push_back({m, v, s});
    }
  }

  auto run_one = [&](const SweepJob& job) {
    TrainConfig tc = base_train;
    tc.seed = job.seed;
    double rp = base_rp;
    PlantedConfig pc = base_planted;
    pc.seed = job.seed;
    if (variable == "k_prop") tc.k_prop = static_cast<int>(job.value);
    if (variable == "r_p") rp = job.value;
    if (variable == "h") pc.h = job.value;
    tc.Validate();

    SparseGraph g;
    if (dataset) {
      g = variable == "h" ? RewireToHeterophily(*dataset, job.value, job.seed) : *dataset;
    } else {
      g = GeneratePlanted(pc);
    }
    const PUSplit split = MakePUSplit(g, rp, job.seed);
    const TrainOutcome r = Train(g, split, tc, job.method);
    SweepRow row;
    row.method = job.method;
    row.variable = variable;
    row.value = job.value;
    row.seed = job.seed;
    row.f1 = r.summary.f1;
    row.pi_hat = r.summary.pi_hat;
    row.prior_error = r.summary.prior_error;
    row.mean_weight_homo = r.summary.mean_weight_homo;
    row.mean_weight_hetero = r.summary.mean_weight_hetero;
    return row;
  };

  std::vector<SweepRow> rows(jobs.size());
  std::vector<std::string> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        rows[i] = run_one(jobs[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!errors[i].empty()) {
      throw std::runtime_error(fmt::format("sweep run {}={} seed {} ({}): {}", variable,
                                           jobs[i].value, jobs[i].seed,
                                           MethodName(jobs[i].method), errors[i]));
    }
  }

  // Aggregates fold over the job order, which does not depend on threading.
  std::vector<SweepRow> out = rows;
  for (Method m : methods) {
    for (double v : values) {
      std::vector<double> f1, pi, err, wh, wx;
      for (const SweepRow& r : rows) {
        if (r.method != m || r.value != v) continue;
        f1.push_back(r.f1);
        pi.push_back(r.pi_hat);
        err.push_back(r.prior_error);
        wh.push_back(r.mean_weight_homo);
        wx.push_back(r.mean_weight_hetero);
      }
      SweepRow agg;
      agg.aggregate = true;
      agg.method = m;
      agg.variable = variable;
      agg.value = v;
      agg.runs = static_cast<int>(f1.size());
      MeanStd(f1, agg.f1, agg.f1_std);
      MeanStd(pi, agg.pi_hat, agg.pi_hat_std);
      MeanStd(err, agg.prior_error, agg.prior_error_std);
      double unused = 0.0;
      MeanStd(wh, agg.mean_weight_homo, unused);
      MeanStd(wx, agg.mean_weight_hetero, unused);
      out.push_back(agg);
    }
  }
  return out;
}

void WriteSweepCsv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "kind,method,variable,value,seed,runs,f1,f1_std,pi_hat,pi_hat_std,prior_error,"
         "prior_error_std,mean_weight_homo,mean_weight_hetero\n";
  for (const SweepRow& r : rows) {
    const std::string seed = r.aggregate ? "" : fmt::format("{}", r.seed);
    fmt::print(out, "{},{},{},{},{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n",
               r.aggregate ? "mean" : "run", MethodName(r.method), r.variable, r.value, seed,
               r.runs, r.f1, r.f1_std, r.pi_hat, r.pi_hat_std, r.prior_error, r.prior_error_std,
               r.mean_weight_homo, r.mean_weight_hetero);
  }
}

}  // namespace gpl
