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

#ifndef GAZEGUARD_CLUSTER_HPP_
#define GAZEGUARD_CLUSTER_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gazeguard/io.hpp"
#include "gazeguard/matrix.hpp"

namespace gazeguard {

double SquaredDistance(std::span<const double> a, std::span<const double> b);
double EuclideanDistance(std::span<const double> a, std::span<const double> b);
std::span<const double> Row(const Matrix& x, Eigen::Index i);

// ---- nearest neighbour identity matching ------------------------------------

struct KnnMatch {
  std::int64_t id = 0;
  double distance = 0.0;
  double confidence = 0.0;  // exp(-distance)
  std::size_t index = 0;    // row of the matched training sample
};

double ConfidenceFromDistance(double distance);

/// 1-NN by Euclidean distance; equidistant neighbours resolve to the lowest row.
KnnMatch Knn1Match(const Matrix& train, std::span<const std::int64_t> ids,
                   std::span<const double> query);

// ---- k-means -------------------------------------------------------------------

struct KMeansConfig {
  int k = 2;
  int n_init = 10;
  int max_iter = 300;
  std::uint64_t seed = 42;
};

class KMeansModel {
 public:
  KMeansModel() = default;
  KMeansModel(Matrix centroids, double wcss, int n_init, std::uint64_t seed,
              std::vector<double> wcss_history);

  const Matrix& centroids() const { return centroids_; }
  int k() const { return static_cast<int>(centroids_.rows()); }
  double wcss() const { return wcss_; }
  int n_init() const { return n_init_; }
  std::uint64_t seed() const { return seed_; }
  /// WCSS after every Lloyd iteration of the winning restart.
  const std::vector<double>& wcss_history() const { return wcss_history_; }

  /// Nearest centroid by squared Euclidean distance (lowest index on ties).
  int Assign(std::span<const double> x) const;
  std::vector<int> Assign(const Matrix& x) const;
  /// Unsquared distance to the nearest centroid.
  double NoveltyScore(std::span<const double> x) const;

  Json ToJson() const;
  static KMeansModel FromJson(const Json& doc);

 private:
  Matrix centroids_;
  double wcss_ = 0.0;
  int n_init_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<double> wcss_history_;
};

double Wcss(const Matrix& x, const Matrix& centroids);

/// Lloyd iterations from k-means++ seeding; best of n_init restarts.
KMeansModel KMeansFit(const Matrix& x, const KMeansConfig& config);
/// Same, with one additional restart from the given centroids.
KMeansModel KMeansFit(const Matrix& x, const KMeansConfig& config, const Matrix* warm_start);

struct WcssPoint {
  int k = 0;
  double wcss = 0.0;
  KMeansModel model;
};

/// Fits k = k_min..k_max. Each k also restarts from the (k-1) solution plus the
/// point farthest from its centroid, which makes the curve non-increasing.
std::vector<WcssPoint> WcssCurve(const Matrix& x, int k_min, int k_max, int n_init,
                                 std::uint64_t seed);

/// Mean silhouette; points in singleton clusters score 0.
double Silhouette(const Matrix& x, std::span<const int> labels);
std::vector<double> SilhouetteSamples(const Matrix& x, std::span<const int> labels);

// ---- novelty threshold -------------------------------------------------------

/// Linear interpolation between order statistics: pos = p/100 * (n-1).
double Percentile(std::vector<double> values, double percentile);

struct NoveltyThreshold {
  double tau = 0.0;
  double percentile = 95.0;
  bool manual_override = false;
  std::vector<double> source_distances;

  Json ToJson() const;
};

NoveltyThreshold FitNoveltyThreshold(const Matrix& existing, const KMeansModel& model,
                                     double percentile = 95.0);
NoveltyThreshold ManualNoveltyThreshold(double tau);
bool IsOutlier(std::span<const double> x, const KMeansModel& model,
               const NoveltyThreshold& threshold);

}  // namespace gazeguard

#endif  // GAZEGUARD_CLUSTER_HPP_
