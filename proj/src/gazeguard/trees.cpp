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

#include "gazeguard/trees.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gazeguard/error.hpp"

namespace gazeguard {
namespace {

using Int128 = __int128;

// Split quality proxy sumsq_l / n_l + sumsq_r / n_r as an exact fraction;
// larger means lower weighted child impurity.
struct Proxy {
  Int128 num = 0;
  Int128 den = 1;

  bool BetterThan(const Proxy& o) const { return num * o.den > o.num * den; }
};

std::size_t ArgMaxLowest(std::span<const std::size_t> counts) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < counts.size(); ++c) {
    if (counts[c] > counts[best]) best = c;
  }
  return best;
}

struct BuildItem {
  int node;
  std::vector<std::size_t> sample;
  int depth;
};

}  // namespace

double Gini(std::span<const std::size_t> class_counts) {
  std::size_t total = 0;
  for (std::size_t c : class_counts) total += c;
  Require(total > 0, ErrorCode::kInvalidArgument, "gini of an empty node");
  double sum = 0.0;
  for (std::size_t c : class_counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    sum += p * p;
  }
  return 1.0 - sum;
}

DecisionTree DecisionTree::Fit(const Matrix& x, std::span<const int> y, int n_classes,
                               const TreeConfig& config) {
  std::vector<std::size_t> sample(static_cast<std::size_t>(x.rows()));
  std::iota(sample.begin(), sample.end(), 0);
  Rng rng(config.seed);
  return FitSample(x, y, n_classes, sample, config, rng);
}

DecisionTree DecisionTree::FitSample(const Matrix& x, std::span<const int> y, int n_classes,
                                     std::span<const std::size_t> sample,
                                     const TreeConfig& config, Rng& rng) {
  Require(static_cast<std::size_t>(x.rows()) == y.size(), ErrorCode::kInvalidArgument,
          "feature rows and labels differ in length");
  Require(!sample.empty(), ErrorCode::kInvalidArgument, "cannot fit a tree on zero samples");
  Require(n_classes >= 1, ErrorCode::kInvalidArgument, "n_classes must be >= 1");
  Require(config.min_samples_split >= 2, ErrorCode::kInvalidArgument,
          "min_samples_split must be >= 2");
  const int d = static_cast<int>(x.cols());
  const int max_features = std::clamp(config.max_features.value_or(d), 1, d);
  const auto nc = static_cast<std::size_t>(n_classes);

  DecisionTree tree;
  tree.n_features_ = d;
  tree.n_classes_ = n_classes;

  auto make_node = [&](std::span<const std::size_t> idx) {
    TreeNode node;
    node.class_counts.assign(nc, 0);
    for (std::size_t i : idx) {
      const int label = y[i];
      Require(label >= 0 && label < n_classes, ErrorCode::kInvalidArgument,
              "label outside [0, n_classes)");
      ++node.class_counts[static_cast<std::size_t>(label)];
    }
    node.n_samples = idx.size();
    node.impurity = Gini(node.class_counts);
    tree.nodes_.push_back(std::move(node));
    return static_cast<int>(tree.nodes_.size() - 1);
  };

  std::vector<BuildItem> stack;
  std::vector<std::size_t> root_sample(sample.begin(), sample.end());
  stack.push_back({make_node(root_sample), std::move(root_sample), 0});
  std::vector<int> features(static_cast<std::size_t>(d));
  std::vector<std::size_t> left_counts(nc), right_counts(nc);

  while (!stack.empty()) {
    BuildItem item = std::move(stack.back());
    stack.pop_back();
    const TreeNode& node = tree.nodes_[static_cast<std::size_t>(item.node)];
    const std::size_t n = item.sample.size();
    if (node.impurity <= 0.0) continue;
    if (config.max_depth && item.depth >= *config.max_depth) continue;
    if (n < static_cast<std::size_t>(config.min_samples_split)) continue;

    // Candidate features: walk a random permutation, skipping features that
    // are constant in this node, until max_features have been collected.
    std::iota(features.begin(), features.end(), 0);
    if (max_features < d) rng.Shuffle(std::span<int>(features));
    std::vector<int> candidates;
    for (int f : features) {
      if (static_cast<int>(candidates.size()) == max_features) break;
      double lo = x(static_cast<Eigen::Index>(item.sample[0]), f);
      double hi = lo;
      for (std::size_t i : item.sample) {
        const double v = x(static_cast<Eigen::Index>(i), f);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi > lo) candidates.push_back(f);
    }
    if (candidates.empty()) continue;
    std::sort(candidates.begin(), candidates.end());

    bool found = false;
    Proxy best;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::size_t> order = item.sample;
    for (int f : candidates) {
      auto value = [&](std::size_t i) { return x(static_cast<Eigen::Index>(i), f); };
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return value(a) < value(b); });
      std::fill(left_counts.begin(), left_counts.end(), 0);
      right_counts = node.class_counts;
      Int128 sumsq_l = 0;
      Int128 sumsq_r = 0;
      for (std::size_t c : right_counts) sumsq_r += static_cast<Int128>(c) * c;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        const auto label = static_cast<std::size_t>(y[order[k]]);
        sumsq_l += 2 * static_cast<Int128>(left_counts[label]) + 1;
        ++left_counts[label];
        sumsq_r -= 2 * static_cast<Int128>(right_counts[label]) - 1;
        --right_counts[label];
        const double a = value(order[k]);
        const double b = value(order[k + 1]);
        if (!(a < b)) continue;
        const auto n_l = static_cast<Int128>(k + 1);
        const auto n_r = static_cast<Int128>(n - k - 1);
        const Proxy proxy{sumsq_l * n_r + sumsq_r * n_l, n_l * n_r};
        if (!found || proxy.BetterThan(best)) {
          found = true;
          best = proxy;
          best_feature = f;
          double mid = a + (b - a) / 2.0;
          if (!(mid < b)) mid = a;
          best_threshold = mid;
        }
      }
    }
    if (!found) continue;

    std::vector<std::size_t> left, right;
    for (std::size_t i : item.sample) {
      (x(static_cast<Eigen::Index>(i), best_feature) <= best_threshold ? left : right)
          .push_back(i);
    }
    const int left_id = make_node(left);
    const int right_id = make_node(right);
    TreeNode& parent = tree.nodes_[static_cast<std::size_t>(item.node)];
    parent.feature = best_feature;
    parent.threshold = best_threshold;
    parent.left = left_id;
    parent.right = right_id;
    // Right pushed first so the left subtree is expanded first.
    stack.push_back({right_id, std::move(right), item.depth + 1});
    stack.push_back({left_id, std::move(left), item.depth + 1});
  }
  return tree;
}

int DecisionTree::PredictRow(std::span<const double> row) const {
  Require(fitted(), ErrorCode::kInvalidArgument, "decision tree is not fitted");
  Require(row.size() == static_cast<std::size_t>(n_features_), ErrorCode::kInvalidArgument,
          "tree expects " + std::to_string(n_features_) + " features, got " +
              std::to_string(row.size()));
  const TreeNode* node = &nodes_[0];
  while (!node->IsLeaf()) {
    node = &nodes_[static_cast<std::size_t>(
        row[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left
                                                                       : node->right)];
  }
  return static_cast<int>(ArgMaxLowest(node->class_counts));
}

std::vector<int> DecisionTree::Predict(const Matrix& x) const {
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out[static_cast<std::size_t>(i)] =
        PredictRow(std::span<const double>(x.row(i).data(), static_cast<std::size_t>(x.cols())));
  }
  return out;
}

std::vector<double> DecisionTree::RawImportance() const {
  std::vector<double> imp(static_cast<std::size_t>(n_features_), 0.0);
  for (const auto& node : nodes_) {
    if (node.IsLeaf()) continue;
    const auto& l = nodes_[static_cast<std::size_t>(node.left)];
    const auto& r = nodes_[static_cast<std::size_t>(node.right)];
    imp[static_cast<std::size_t>(node.feature)] +=
        static_cast<double>(node.n_samples) * node.impurity -
        static_cast<double>(l.n_samples) * l.impurity -
        static_cast<double>(r.n_samples) * r.impurity;
  }
  for (double& v : imp) v = std::max(v, 0.0);
  return imp;
}

std::vector<double> DecisionTree::FeatureImportance() const {
  Require(fitted(), ErrorCode::kInvalidArgument, "decision tree is not fitted");
  auto imp = RawImportance();
  const double total = std::accumulate(imp.begin(), imp.end(), 0.0);
  if (total > 0.0) {
    for (double& v : imp) v /= total;
  }
  return imp;
}

int DecisionTree::Depth() const {
  if (nodes_.empty()) return 0;
  std::vector<int> depth(nodes_.size(), 0);
  int max_depth = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& node = nodes_[i];
    max_depth = std::max(max_depth, depth[i]);
    if (!node.IsLeaf()) {
      depth[static_cast<std::size_t>(node.left)] = depth[i] + 1;
      depth[static_cast<std::size_t>(node.right)] = depth[i] + 1;
    }
  }
  return max_depth;
}

Json DecisionTree::ToJson() const {
  Json nodes = Json::array();
  for (const auto& node : nodes_) {
    if (node.IsLeaf()) {
      nodes.push_back(Json{{"counts", node.class_counts}});
    } else {
      nodes.push_back(Json{{"feature", node.feature},
                           {"threshold", FormatDouble(node.threshold)},
                           {"left", node.left},
                           {"right", node.right},
                           {"counts", node.class_counts}});
    }
  }
  return Json{{"format", "gazeguard.tree"},
              {"version", 1},
              {"n_features", n_features_},
              {"n_classes", n_classes_},
              {"nodes", nodes}};
}

DecisionTree DecisionTree::FromJson(const Json& doc) {
  Require(doc.value("format", "") == "gazeguard.tree" && doc.value("version", 0) == 1,
          ErrorCode::kData, "not a version-1 tree document");
  DecisionTree tree;
  tree.n_features_ = doc.at("n_features").get<int>();
  tree.n_classes_ = doc.at("n_classes").get<int>();
  for (const auto& j : doc.at("nodes")) {
    TreeNode node;
    node.class_counts = j.at("counts").get<std::vector<std::size_t>>();
    node.n_samples = std::accumulate(node.class_counts.begin(), node.class_counts.end(),
                                     std::size_t{0});
    Require(node.n_samples > 0, ErrorCode::kData, "tree node with no samples");
    node.impurity = Gini(node.class_counts);
    if (j.contains("feature")) {
      node.feature = j.at("feature").get<int>();
      auto t = ParseDouble(j.at("threshold").get<std::string>());
      Require(t.has_value(), ErrorCode::kData, "bad threshold in tree document");
      node.threshold = *t;
      node.left = j.at("left").get<int>();
      node.right = j.at("right").get<int>();
    }
    tree.nodes_.push_back(std::move(node));
  }
  const int count = static_cast<int>(tree.nodes_.size());
  for (const auto& node : tree.nodes_) {
    if (!node.IsLeaf()) {
      Require(node.left > 0 && node.left < count && node.right > 0 && node.right < count &&
                  node.feature < tree.n_features_,
              ErrorCode::kData, "dangling child in tree document");
    }
  }
  return tree;
}

int MajorityVote(std::span<const int> votes, int n_classes) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(n_classes), 0);
  for (int v : votes) ++counts.at(static_cast<std::size_t>(v));
  return static_cast<int>(ArgMaxLowest(counts));
}

RandomForest RandomForest::Fit(const Matrix& x, std::span<const int> y, int n_classes,
                               const ForestConfig& config) {
  Require(config.n_estimators >= 1, ErrorCode::kInvalidArgument, "n_estimators must be >= 1");
  const auto n = static_cast<std::size_t>(x.rows());
  Require(n > 0, ErrorCode::kInvalidArgument, "cannot fit a forest on zero samples");
  TreeConfig tree_config;
  tree_config.max_depth = config.max_depth;
  tree_config.min_samples_split = config.min_samples_split;
  tree_config.max_features = config.max_features.value_or(
      std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(x.cols()))))));

  RandomForest forest;
  forest.n_classes_ = n_classes;
  forest.trees_.reserve(static_cast<std::size_t>(config.n_estimators));
  std::vector<std::size_t> sample(n);
  for (int t = 0; t < config.n_estimators; ++t) {
    // Each tree owns a stream keyed by (seed, tree index), so results do not
    // depend on the order in which trees are built.
    tree_config.seed = DeriveSeed(config.seed, "forest.tree", static_cast<std::uint64_t>(t));
    Rng rng(tree_config.seed);
    if (config.bootstrap) {
      for (auto& s : sample) s = rng.Index(n);
    } else {
      std::iota(sample.begin(), sample.end(), 0);
    }
    forest.trees_.push_back(DecisionTree::FitSample(x, y, n_classes, sample, tree_config, rng));
  }
  return forest;
}

RandomForest RandomForest::FromTrees(std::vector<DecisionTree> trees) {
  Require(!trees.empty(), ErrorCode::kInvalidArgument, "a forest needs at least one tree");
  RandomForest forest;
  forest.n_classes_ = trees.front().n_classes();
  for (const auto& t : trees) {
    Require(t.n_classes() == forest.n_classes_ && t.n_features() == trees.front().n_features(),
            ErrorCode::kInvalidArgument, "trees disagree on shape");
  }
  forest.trees_ = std::move(trees);
  return forest;
}

int RandomForest::PredictRow(std::span<const double> row) const {
  Require(!trees_.empty(), ErrorCode::kInvalidArgument, "random forest is not fitted");
  std::vector<int> votes;
  votes.reserve(trees_.size());
  for (const auto& t : trees_) votes.push_back(t.PredictRow(row));
  return MajorityVote(votes, n_classes_);
}

std::vector<int> RandomForest::Predict(const Matrix& x) const {
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out[static_cast<std::size_t>(i)] =
        PredictRow(std::span<const double>(x.row(i).data(), static_cast<std::size_t>(x.cols())));
  }
  return out;
}

std::vector<double> RandomForest::FeatureImportance() const {
  Require(!trees_.empty(), ErrorCode::kInvalidArgument, "random forest is not fitted");
  std::vector<double> total(static_cast<std::size_t>(trees_.front().n_features()), 0.0);
  for (const auto& t : trees_) {
    const auto imp = t.FeatureImportance();
    for (std::size_t j = 0; j < total.size(); ++j) total[j] += imp[j];
  }
  const double sum = std::accumulate(total.begin(), total.end(), 0.0);
  if (sum > 0.0) {
    for (double& v : total) v /= sum;
  }
  return total;
}

Json RandomForest::ToJson() const {
  Json trees = Json::array();
  for (const auto& t : trees_) trees.push_back(t.ToJson());
  return Json{{"format", "gazeguard.forest"},
              {"version", 1},
              {"n_classes", n_classes_},
              {"trees", trees}};
}

RandomForest RandomForest::FromJson(const Json& doc) {
  Require(doc.value("format", "") == "gazeguard.forest" && doc.value("version", 0) == 1,
          ErrorCode::kData, "not a version-1 forest document");
  std::vector<DecisionTree> trees;
  for (const auto& t : doc.at("trees")) trees.push_back(DecisionTree::FromJson(t));
  return FromTrees(std::move(trees));
}

}  // namespace gazeguard
