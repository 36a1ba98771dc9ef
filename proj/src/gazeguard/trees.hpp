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

#ifndef GAZEGUARD_TREES_HPP_
#define GAZEGUARD_TREES_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gazeguard/io.hpp"
#include "gazeguard/matrix.hpp"
#include "gazeguard/rng.hpp"

namespace gazeguard {

/// 1 - sum_c p_c^2 over the class proportions.
double Gini(std::span<const std::size_t> class_counts);

struct TreeConfig {
  std::optional<int> max_depth;    // unlimited when empty
  int min_samples_split = 2;
  std::optional<int> max_features; // all features when empty
  std::uint64_t seed = 42;
};

struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<std::size_t> class_counts;
  double impurity = 0.0;
  std::size_t n_samples = 0;

  bool IsLeaf() const { return feature < 0; }
};

/// CART classifier with Gini splits; samples with x[f] <= threshold go left.
class DecisionTree {
 public:
  static DecisionTree Fit(const Matrix& x, std::span<const int> y, int n_classes,
                          const TreeConfig& config);
  /// Fits on a multiset of row indices (bootstrap samples may repeat rows).
  static DecisionTree FitSample(const Matrix& x, std::span<const int> y, int n_classes,
                                std::span<const std::size_t> sample, const TreeConfig& config,
                                Rng& rng);

  bool fitted() const { return !nodes_.empty(); }
  int PredictRow(std::span<const double> row) const;
  std::vector<int> Predict(const Matrix& x) const;

  /// Impurity decrease per feature, normalized to sum 1 (all zero for a stump).
  std::vector<double> RawImportance() const;
  std::vector<double> FeatureImportance() const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int n_features() const { return n_features_; }
  int n_classes() const { return n_classes_; }
  int Depth() const;

  Json ToJson() const;
  static DecisionTree FromJson(const Json& doc);

 private:
  std::vector<TreeNode> nodes_;
  int n_features_ = 0;
  int n_classes_ = 0;
};

struct ForestConfig {
  int n_estimators = 100;
  std::optional<int> max_depth;
  int min_samples_split = 2;
  std::optional<int> max_features;  // floor(sqrt(d)) when empty
  bool bootstrap = true;
  std::uint64_t seed = 42;
};

class RandomForest {
 public:
  static RandomForest Fit(const Matrix& x, std::span<const int> y, int n_classes,
                          const ForestConfig& config);
  static RandomForest FromTrees(std::vector<DecisionTree> trees);

  int PredictRow(std::span<const double> row) const;
  std::vector<int> Predict(const Matrix& x) const;
  std::vector<double> FeatureImportance() const;

  const std::vector<DecisionTree>& trees() const { return trees_; }

  Json ToJson() const;
  static RandomForest FromJson(const Json& doc);

 private:
  std::vector<DecisionTree> trees_;
  int n_classes_ = 0;
};

/// Majority vote; ties go to the lowest class index.
int MajorityVote(std::span<const int> votes, int n_classes);

}  // namespace gazeguard

#endif  // GAZEGUARD_TREES_HPP_
