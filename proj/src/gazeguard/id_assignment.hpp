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

#ifndef GAZEGUARD_ID_ASSIGNMENT_HPP_
#define GAZEGUARD_ID_ASSIGNMENT_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gazeguard/cluster.hpp"
#include "gazeguard/io.hpp"
#include "gazeguard/isolation_forest.hpp"
#include "gazeguard/matrix.hpp"

namespace gazeguard {

enum class Strategy { kSequential, kSimilarity, kOutlier, kClustering, kFeatureHash, kEnsemble };

const char* StrategyName(Strategy strategy);
Strategy ParseStrategy(std::string_view name);

struct AssignmentDecision {
  Strategy strategy = Strategy::kSequential;
  bool is_new = false;
  std::int64_t id = 0;
  std::vector<std::pair<std::string, double>> evidence;
  std::string canonical_features;                  // feature_hash only
  std::vector<std::pair<std::string, bool>> votes;  // ensemble only: true = "new"

  double Evidence(std::string_view key) const;
  Json ToJson() const;
};

constexpr std::int64_t kHashIdSpace = 10000;

AssignmentDecision SequentialAssign(std::span<const std::int64_t> existing_ids);

/// Matched when confidence >= threshold.
AssignmentDecision SimilarityAssign(std::span<const double> query, const Matrix& known_x,
                                    std::span<const std::int64_t> known_ids,
                                    double confidence_threshold);

/// New when the anomaly score exceeds the model threshold; otherwise the 1-NN id.
AssignmentDecision OutlierAssign(std::span<const double> query,
                                 const IsolationForestModel& iforest, const Matrix& known_x,
                                 std::span<const std::int64_t> known_ids);

/// `known_clusters` holds the cluster of every known row under `kmeans`.
AssignmentDecision ClusterAssign(std::span<const double> query, const KMeansModel& kmeans,
                                 const NoveltyThreshold& threshold,
                                 std::span<const int> known_clusters,
                                 std::span<const std::int64_t> known_ids);

/// "%.6f" values joined by commas.
std::string CanonicalFeatureString(std::span<const double> features);
/// First 8 hex digits of the MD5 digest, as an integer.
std::uint32_t FeatureHashValue(std::string_view canonical);
AssignmentDecision FeatureHashAssign(std::span<const double> features,
                                     std::span<const std::int64_t> existing_ids);

struct AssignmentContext {
  const Matrix* known_x = nullptr;
  std::span<const std::int64_t> known_ids;
  double confidence_threshold = 0.5;
  const IsolationForestModel* iforest = nullptr;
  const KMeansModel* kmeans = nullptr;
  const NoveltyThreshold* novelty = nullptr;
  std::span<const int> known_clusters;
};

/// Two or more "new" votes among similarity, outlier and clustering give a new
/// id; otherwise the similarity match is returned.
AssignmentDecision EnsembleAssign(std::span<const double> query, const AssignmentContext& ctx);

AssignmentDecision Assign(Strategy strategy, std::span<const double> query,
                          const AssignmentContext& ctx);

}  // namespace gazeguard

#endif  // GAZEGUARD_ID_ASSIGNMENT_HPP_
