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

#ifndef GAZEGUARD_ISOLATION_FOREST_HPP_
#define GAZEGUARD_ISOLATION_FOREST_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gazeguard/io.hpp"
#include "gazeguard/matrix.hpp"

namespace gazeguard {

struct IsolationForestConfig {
  int n_trees = 100;
  std::size_t subsample_size = 256;  // capped at the number of rows
  double threshold = 0.5;
  std::uint64_t seed = 42;
};

struct IsolationNode {
  int feature = -1;  // -1 marks an external node
  double split = 0.0;
  int left = -1;
  int right = -1;
  std::size_t size = 0;
};

struct IsolationTree {
  std::vector<IsolationNode> nodes;
};

/// Average unsuccessful-search path length in a BST of n points.
double AveragePathLength(std::size_t n);

/// 2^(-mean_path / c(psi)).
double AnomalyScoreFromPath(double mean_path, std::size_t psi);

class IsolationForestModel {
 public:
  IsolationForestModel() = default;

  static IsolationForestModel Fit(const Matrix& x, const IsolationForestConfig& config);

  double PathLength(std::span<const double> x, std::size_t tree) const;
  double AnomalyScore(std::span<const double> x) const;
  /// Strictly greater than the configured threshold.
  bool IsAnomaly(std::span<const double> x) const;

  std::size_t subsample_size() const { return subsample_size_; }
  int height_limit() const { return height_limit_; }
  double threshold() const { return threshold_; }
  const std::vector<IsolationTree>& trees() const { return trees_; }
  int MaxTreeHeight() const;

  Json ToJson() const;

 private:
  std::vector<IsolationTree> trees_;
  std::size_t subsample_size_ = 0;
  std::size_t n_features_ = 0;
  int height_limit_ = 0;
  double threshold_ = 0.5;
  std::uint64_t seed_ = 0;
};

}  // namespace gazeguard

#endif  // GAZEGUARD_ISOLATION_FOREST_HPP_
