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

#include "gpl/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>

#include <fmt/format.h>
#include <fmt/os.h>

namespace gpl {

void ValidateSplit(const PUSplit& split, std::size_t n) {
  std::vector<int> seen(n, 0);
  for (NodeId i : split.positives) {
    if (i >= n) throw GraphError(fmt::format("split: positive node {} out of range", i));
    ++seen[i];
  }
  for (NodeId i : split.unlabeled) {
    if (i >= n) throw GraphError(fmt::format("split: unlabeled node {} out of range", i));
    ++seen[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (seen[i] != 1) {
      throw GraphError(fmt::format("split: node {} appears {} times", i, seen[i]));
    }
  }
}

void PlantedConfig::Validate() const {
  if (n < 2) throw GraphError("planted graph needs n >= 2");
  if (!(pi_p > 0.0 && pi_p < 1.0)) throw GraphError("pi_p must lie in (0, 1)");
  if (!(h >= 0.0 && h <= 1.0)) throw GraphError("h must lie in [0, 1]");
  if (!(avg_degree >= 1.0)) throw GraphError("avg_degree must be >= 1");
  if (feature_dim < 1) throw GraphError("feature_dim must be >= 1");
}

namespace {

std::uint64_t PairKey(NodeId u, NodeId v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint64_t>(v);
}

// Draws `count` distinct pairs from `left` x `right` (or from pairs within
// `left` when `right` is null).
void SamplePairs(std::mt19937_64& rng, const std::vector<NodeId>& left,
                 const std::vector<NodeId>* right, std::uint64_t count,
                 std::vector<std::pair<NodeId, NodeId>>& out) {
  if (count == 0) return;
  const std::uint64_t nl = left.size();
  const std::uint64_t total = right ? nl * right->size() : nl * (nl - 1) / 2;
  std::unordered_set<std::uint64_t> used;
  used.reserve(count * 2);
  if (count * 2 > total) {
    // Dense: enumerate and take a random subset.
    std::vector<std::pair<NodeId, NodeId>> all;
    all.reserve(total);
    if (right) {
      for (NodeId a : left)
        for (NodeId b : *right) all.emplace_back(a, b);
    } else {
      for (std::size_t i = 0; i < left.size(); ++i)
        for (std::size_t j = i + 1; j < left.size(); ++j) all.emplace_back(left[i], left[j]);
    }
    std::shuffle(all.begin(), all.end(), rng);
    out.insert(out.end(), all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count));
    return;
  }
  std::uniform_int_distribution<std::size_t> pl(0, left.size() - 1);
  std::uniform_int_distribution<std::size_t> pr(0, right ? right->size() - 1 : 0);
  while (used.size() < count) {
    const NodeId a = left[pl(rng)];
    const NodeId b = right ? (*right)[pr(rng)] : left[pl(rng)];
    if (a == b) continue;
    if (used.insert(PairKey(a, b)).second) out.emplace_back(a, b);
  }
}

}  // namespace

SparseGraph GeneratePlanted(const PlantedConfig& cfg) {
  cfg.Validate();
  std::mt19937_64 rng(cfg.seed);
  const std::size_t n = cfg.n;
  const auto num_pos = static_cast<std::size_t>(std::floor(cfg.pi_p * static_cast<double>(n)));
  if (num_pos == 0 || num_pos == n) throw GraphError("planted graph needs both classes");

  std::vector<NodeId> perm(n);
  for (NodeId i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> labels(n, -1);
  std::vector<NodeId> pos(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(num_pos));
  std::vector<NodeId> neg(perm.begin() + static_cast<std::ptrdiff_t>(num_pos), perm.end());
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  for (NodeId i : pos) labels[i] = 1;

  const std::uint64_t np = pos.size(), nn = neg.size();
  const std::uint64_t cross_pairs = np * nn;
  const std::uint64_t pp_pairs = np * (np - 1) / 2;
  const std::uint64_t nn_pairs = nn * (nn - 1) / 2;
  const auto m = static_cast<std::uint64_t>(
      std::llround(static_cast<double>(n) * cfg.avg_degree / 2.0));
  const auto m_cross = static_cast<std::uint64_t>(std::llround(cfg.h * static_cast<double>(m)));
  const std::uint64_t m_within = m - m_cross;
  if (m_cross > cross_pairs || m_within > pp_pairs + nn_pairs) {
    const double lo = m > pp_pairs + nn_pairs
                          ? static_cast<double>(m - pp_pairs - nn_pairs) / static_cast<double>(m)
                          : 0.0;
    const double hi = std::min(1.0, static_cast<double>(cross_pairs) / static_cast<double>(m));
    throw GraphError(fmt::format(
        "planted graph infeasible: h = {} with {} edges; achievable range [{:.4f}, {:.4f}]",
        cfg.h, m, lo, hi));
  }
  auto m_pp = static_cast<std::uint64_t>(std::llround(
      static_cast<double>(m_within) * static_cast<double>(pp_pairs) /
      static_cast<double>(pp_pairs + nn_pairs)));
  m_pp = std::min(m_pp, pp_pairs);
  std::uint64_t m_nn = m_within - m_pp;
  if (m_nn > nn_pairs) {
    m_pp += m_nn - nn_pairs;
    m_nn = nn_pairs;
  }

  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(m);
  SamplePairs(rng, pos, &neg, m_cross, edges);
  SamplePairs(rng, pos, nullptr, m_pp, edges);
  SamplePairs(rng, neg, nullptr, m_nn, edges);

  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cfg.feature_dim));
  std::normal_distribution<double> noise(0.0, 1.0);
  for (NodeId i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < cfg.feature_dim; ++d) x(i, d) = noise(rng);
    x(i, 0) += labels[i] * cfg.feature_separation;
  }
  return SparseGraph::Build(n, edges, std::move(x), std::move(labels));
}

std::vector<int> BinarizeLabels(std::span<const int> classes) {
  std::map<int, std::size_t> counts;
  for (int c : classes) ++counts[c];
  if (counts.size() < 2) throw GraphError("binarization needs at least two classes");
  int best = counts.begin()->first;
  std::size_t best_count = 0;
  for (const auto& [c, k] : counts) {  // ascending class id; strict > keeps the smallest on ties
    if (k > best_count) {
      best = c;
      best_count = k;
    }
  }
  std::vector<int> out(classes.size());
  for (std::size_t i = 0; i < classes.size(); ++i) out[i] = classes[i] == best ? 1 : -1;
  return out;
}

PUSplit MakePUSplit(const SparseGraph& g, double r_p, std::uint64_t seed) {
  if (!(r_p > 0.0 && r_p <= 1.0)) throw GraphError("r_p must lie in (0, 1]");
  if (!g.has_labels()) throw GraphError("graph has no labels");
  std::vector<NodeId> pos;
  for (NodeId i = 0; i < g.num_nodes(); ++i)
    if (g.labels()[i] > 0) pos.push_back(i);
  if (pos.empty()) throw GraphError("graph has no positive nodes");

  std::mt19937_64 rng(seed);
  std::shuffle(pos.begin(), pos.end(), rng);
  auto observed = static_cast<std::size_t>(std::llround(r_p * static_cast<double>(pos.size())));
  observed = std::clamp<std::size_t>(observed, 1, pos.size());

  PUSplit split;
  split.r_p = r_p;
  split.positives.assign(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(observed));
  std::sort(split.positives.begin(), split.positives.end());
  std::vector<char> is_p(g.num_nodes(), 0);
  for (NodeId i : split.positives) is_p[i] = 1;
  std::size_t hidden = 0;
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    if (is_p[i]) continue;
    split.unlabeled.push_back(i);
    if (g.labels()[i] > 0) ++hidden;
  }
  split.pi_true = split.unlabeled.empty()
                      ? 0.0
                      : static_cast<double>(hidden) / static_cast<double>(split.unlabeled.size());
  return split;
}

namespace {

std::ifstream OpenInput(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw GraphError(fmt::format("cannot open {}", p.string()));
  return in;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool ParseNumber(std::string_view s, T& out) {
  s = Trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

SparseGraph LoadDataset(const std::filesystem::path& dir) {
  const auto edge_path = dir / "edges.tsv";
  const auto feat_path = dir / "features.csv";
  const auto label_path = dir / "labels.txt";

  std::vector<int> classes;
  {
    auto in = OpenInput(label_path);
    std::string line;
    for (std::size_t ln = 1; std::getline(in, line); ++ln) {
      if (Trim(line).empty()) continue;
      int c = 0;
      if (!ParseNumber(line, c)) {
        throw GraphError(fmt::format("{}:{}: cannot parse label '{}'", label_path.string(), ln, line));
      }
      classes.push_back(c);
    }
  }
  const std::size_t n = classes.size();
  const bool signs = std::all_of(classes.begin(), classes.end(), [](int c) { return c == 1 || c == -1; }) &&
                     std::find(classes.begin(), classes.end(), -1) != classes.end();
  std::vector<int> labels = signs ? classes : BinarizeLabels(classes);

  std::vector<std::vector<double>> rows;
  {
    auto in = OpenInput(feat_path);
    std::string line;
    for (std::size_t ln = 1; std::getline(in, line); ++ln) {
      if (Trim(line).empty()) continue;
      std::vector<double> row;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) {
        double v = 0.0;
        if (!ParseNumber(cell, v)) {
          throw GraphError(fmt::format("{}:{}: cannot parse value '{}'", feat_path.string(), ln, cell));
        }
        row.push_back(v);
      }
      if (!rows.empty() && row.size() != rows.front().size()) {
        throw GraphError(fmt::format("{}:{}: expected {} columns, found {}", feat_path.string(), ln,
                                     rows.front().size(), row.size()));
      }
      rows.push_back(std::move(row));
    }
  }
  if (rows.size() != n) {
    throw GraphError(fmt::format("{} has {} rows but {} has {}", feat_path.string(), rows.size(),
                                 label_path.string(), n));
  }
  const std::size_t d = rows.empty() ? 0 : rows.front().size();
  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) x(i, j) = rows[i][j];

  std::vector<std::pair<NodeId, NodeId>> edges;
  {
    auto in = OpenInput(edge_path);
    std::string line;
    for (std::size_t ln = 1; std::getline(in, line); ++ln) {
      const auto t = Trim(line);
      if (t.empty()) continue;
      const auto tab = t.find('\t');
      std::size_t a = 0, b = 0;
      if (tab == std::string_view::npos || !ParseNumber(t.substr(0, tab), a) ||
          !ParseNumber(t.substr(tab + 1), b)) {
        throw GraphError(fmt::format("{}:{}: malformed edge line '{}'", edge_path.string(), ln, line));
      }
      if (a >= n || b >= n || a == b) {
        throw GraphError(fmt::format("{}:{}: invalid edge ({}, {}) for n = {}", edge_path.string(), ln,
                                     a, b, n));
      }
      edges.emplace_back(a, b);
    }
  }
  return SparseGraph::Build(n, edges, std::move(x), std::move(labels));
}

void SaveDataset(const SparseGraph& g, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto out = fmt::output_file((dir / "edges.tsv").string());
    for (const Edge& e : g.edges()) out.print("{}\t{}\n", e.u, e.v);
  }
  {
    auto out = fmt::output_file((dir / "features.csv").string());
    const Matrix& x = g.features();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = 0; j < x.cols(); ++j) out.print("{}{:.17g}", j ? "," : "", x(i, j));
      out.print("\n");
    }
  }
  {
    auto out = fmt::output_file((dir / "labels.txt").string());
    for (int y : g.labels()) out.print("{}\n", y > 0 ? "+1" : "-1");
  }
}

}  // namespace gpl
