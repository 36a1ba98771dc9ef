// Copyright 2026 The GazeGuard Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gazeguard/isolation_forest.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "gazeguard/error.hpp"
#include "gazeguard/rng.hpp"

namespace gazeguard {
namespace {

constexpr double kEulerGamma = std::numbers::egamma;

struct Frame {
  int node;
  std::vector<std::size_t> rows;
  int depth;
};

IsolationTree GrowTree(const Matrix& x, std::vector<std::size_t> rows, int height_limit,
                       Rng& rng) {
  IsolationTree tree;
  tree.nodes.push_back({});
  std::vector<Frame> stack;
  stack.push_back({0, std::move(rows), 0});
  const auto d = static_cast<std::size_t>(x.cols());
  while (!stack.empty()) {
    Frame frame = std::move(stack.back());
    stack.pop_back();
    tree.nodes[frame.node].size = frame.rows.size();
    if (frame.depth >= height_limit || frame.rows.size() <= 1) continue;

    std::vector<std::size_t> candidates;
    std::vector<double> lo(d), hi(d);
    for (std::size_t f = 0; f < d; ++f) {
      lo[f] = hi[f] = x(frame.rows[0], f);
      for (std::size_t r : frame.rows) {
        lo[f] = std::min(lo[f], x(r, f));
        hi[f] = std::max(hi[f], x(r, f));
      }
      if (hi[f] > lo[f]) candidates.push_back(f);
    }
    if (candidates.empty()) continue;
    const std::size_t f = candidates[rng.Index(candidates.size())];
    double split = rng.Uniform(lo[f], hi[f]);
    if (split <= lo[f]) split = std::nextafter(lo[f], hi[f]);

    std::vector<std::size_t> left, right;
    for (std::size_t r : frame.rows) (x(r, f) < split ? left : right).push_back(r);
    const int li = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    tree.nodes.push_back({});
    auto& node = tree.nodes[frame.node];
    node.feature = static_cast<int>(f);
    node.split = split;
    node.left = li;
    node.right = li + 1;
    stack.push_back({li + 1, std::move(right), frame.depth + 1});
    stack.push_back({li, std::move(left), frame.depth + 1});
  }
  return tree;
}

int Height(const IsolationTree& tree, int node) {
  const auto& n = tree.nodes[node];
  if (n.feature < 0) return 0;
  return 1 + std::max(Height(tree, n.left), Height(tree, n.right));
}

}  // namespace

double AveragePathLength(std::size_t n) {
  if (n <= 1) return 0.0;
  if (n == 2) return 1.0;
  const double m = static_cast<double>(n - 1);
  return 2.0 * (std::log(m) + kEulerGamma) - 2.0 * m / static_cast<double>(n);
}

double AnomalyScoreFromPath(double mean_path, std::size_t psi) {
  const double c = AveragePathLength(psi);
  Require(c > 0.0, ErrorCode::kInvalidArgument, "anomaly score needs a subsample of >= 2");
  return std::exp2(-mean_path / c);
}

IsolationForestModel IsolationForestModel::Fit(const Matrix& x,
                                               const IsolationForestConfig& config) {
  Require(config.n_trees >= 1, ErrorCode::kInvalidArgument, "n_trees must be >= 1");
  const auto n = static_cast<std::size_t>(x.rows());
  const std::size_t psi = std::min(config.subsample_size, n);
  Require(psi >= 2, ErrorCode::kInvalidArgument,
          "isolation forest needs a subsample size of at least 2");
  Require(config.threshold > 0.0 && config.threshold < 1.0, ErrorCode::kInvalidArgument,
          "anomaly threshold must lie in (0, 1)");

  IsolationForestModel model;
  model.subsample_size_ = psi;
  model.n_features_ = static_cast<std::size_t>(x.cols());
  model.height_limit_ = static_cast<int>(std::ceil(std::log2(static_cast<double>(psi))));
  model.threshold_ = config.threshold;
  model.seed_ = config.seed;
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (int t = 0; t < config.n_trees; ++t) {
    Rng rng(DeriveSeed(config.seed, "iforest.tree", static_cast<std::uint64_t>(t)));
    std::vector<std::size_t> rows = all;
    // Partial Fisher-Yates: the first psi entries are a sample without replacement.
    for (std::size_t i = 0; i < psi; ++i) {
      std::swap(rows[i], rows[i + rng.Index(n - i)]);
    }
    rows.resize(psi);
    model.trees_.push_back(GrowTree(x, std::move(rows), model.height_limit_, rng));
  }
  return model;
}

double IsolationForestModel::PathLength(std::span<const double> x, std::size_t tree) const {
  Require(!trees_.empty(), ErrorCode::kInvalidArgument, "isolation forest is not fitted");
  Require(x.size() == n_features_, ErrorCode::kInvalidArgument,
          "isolation forest feature count mismatch");
  const auto& nodes = trees_.at(tree).nodes;
  int i = 0;
  int depth = 0;
  while (nodes[i].feature >= 0) {
    i = x[static_cast<std::size_t>(nodes[i].feature)] < nodes[i].split ? nodes[i].left
                                                                        : nodes[i].right;
    ++depth;
  }
  return depth + AveragePathLength(nodes[i].size);
}

double IsolationForestModel::AnomalyScore(std::span<const double> x) const {
  Require(!trees_.empty(), ErrorCode::kInvalidArgument, "isolation forest is not fitted");
  double total = 0.0;
  for (std::size_t t = 0; t < trees_.size(); ++t) total += PathLength(x, t);
  return AnomalyScoreFromPath(total / static_cast<double>(trees_.size()), subsample_size_);
}

bool IsolationForestModel::IsAnomaly(std::span<const double> x) const {
  return AnomalyScore(x) > threshold_;
}

int IsolationForestModel::MaxTreeHeight() const {
  int h = 0;
  for (const auto& t : trees_) h = std::max(h, Height(t, 0));
  return h;
}

Json IsolationForestModel::ToJson() const {
  Json trees = Json::array();
  for (const auto& t : trees_) {
    Json nodes = Json::array();
    for (const auto& n : t.nodes) {
      if (n.feature < 0) {
        nodes.push_back(Json{{"size", n.size}});
      } else {
        nodes.push_back(Json{{"feature", n.feature},
                             {"split", FormatDouble(n.split)},
                             {"left", n.left},
                             {"right", n.right}});
      }
    }
    trees.push_back(std::move(nodes));
  }
  return Json{{"format", "gazeguard.iforest"},
              {"version", 1},
              {"subsample_size", subsample_size_},
              {"height_limit", height_limit_},
              {"threshold", threshold_},
              {"seed", seed_},
              {"trees", std::move(trees)}};
}

}  // namespace gazeguard
