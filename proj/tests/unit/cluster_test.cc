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

#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "gazeguard/cluster.hpp"
#include "gazeguard/error.hpp"
#include "gazeguard/isolation_forest.hpp"
#include "gazeguard/pca.hpp"
#include "gazeguard/rng.hpp"

namespace gazeguard {
namespace {

// Three well separated 2-d blobs of n points each.
Matrix ThreeBlobs(int n, std::uint64_t seed) {
  Rng rng(seed);
  const double centers[3][2] = {{0, 0}, {10, 0}, {0, 10}};
  Matrix x(3 * n, 2);
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < n; ++i) {
      x(c * n + i, 0) = centers[c][0] + 0.5 * rng.Normal();
      x(c * n + i, 1) = centers[c][1] + 0.5 * rng.Normal();
    }
  }
  return x;
}

TEST(KnnTest, ConfidenceIsExpNegativeDistance) {
  EXPECT_NEAR(ConfidenceFromDistance(2.69), 0.06788093937176144, 1e-15);
  EXPECT_DOUBLE_EQ(ConfidenceFromDistance(0.0), 1.0);
}

TEST(KnnTest, NearestWithLowestIndexOnTies) {
  Matrix train(3, 2);
  train << 0, 0, 2, 0, 3, 4;
  const std::vector<std::int64_t> ids{7, 8, 9};
  const std::vector<double> q{1, 0};
  const KnnMatch m = Knn1Match(train, ids, q);
  EXPECT_EQ(m.id, 7);
  EXPECT_EQ(m.index, 0u);
  EXPECT_DOUBLE_EQ(m.distance, 1.0);
  const std::vector<double> q2{3, 4};
  EXPECT_EQ(Knn1Match(train, ids, q2).id, 9);
  EXPECT_DOUBLE_EQ(Knn1Match(train, ids, q2).confidence, 1.0);
}

TEST(PercentileTest, LinearInterpolation) {
  std::vector<double> v(20);
  std::iota(v.begin(), v.end(), 1.0);
  EXPECT_NEAR(Percentile(v, 95.0), 19.05, 1e-12);
  EXPECT_DOUBLE_EQ(Percentile(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(Percentile(v, 100.0), 20.0);
  EXPECT_DOUBLE_EQ(Percentile({3.0}, 50.0), 3.0);
}

TEST(KMeansTest, RecoversBlobs) {
  const Matrix x = ThreeBlobs(30, 1);
  KMeansConfig c;
  c.k = 3;
  const KMeansModel m = KMeansFit(x, c);
  const auto labels = m.Assign(x);
  for (int b = 0; b < 3; ++b) {
    for (int i = 1; i < 30; ++i) EXPECT_EQ(labels[b * 30 + i], labels[b * 30]);
  }
  EXPECT_NEAR(m.wcss(), Wcss(x, m.centroids()), 1e-9);
  // Lloyd never increases the objective.
  const auto& h = m.wcss_history();
  for (std::size_t i = 1; i < h.size(); ++i) EXPECT_LE(h[i], h[i - 1] + 1e-9);
}

TEST(KMeansTest, DeterministicAndJsonRoundTrip) {
  const Matrix x = ThreeBlobs(20, 2);
  KMeansConfig c;
  c.k = 4;
  c.seed = 3;
  const auto a = KMeansFit(x, c);
  EXPECT_EQ(a.ToJson(), KMeansFit(x, c).ToJson());
  const auto back = KMeansModel::FromJson(a.ToJson());
  EXPECT_EQ(back.Assign(x), a.Assign(x));
}

TEST(KMeansTest, RejectsMoreClustersThanPoints) {
  KMeansConfig c;
  c.k = 5;
  EXPECT_THROW(KMeansFit(Matrix::Zero(3, 2), c), Error);
}

TEST(WcssCurveTest, NonIncreasingInK) {
  const Matrix x = ThreeBlobs(15, 4);
  const auto curve = WcssCurve(x, 2, 6, 5, 7);
  ASSERT_EQ(curve.size(), 5u);
  for (std::size_t i = 1; i < curve.size(); ++i) {
    EXPECT_EQ(curve[i].k, curve[i - 1].k + 1);
    EXPECT_LE(curve[i].wcss, curve[i - 1].wcss + 1e-9);
  }
}

TEST(SilhouetteTest, PicksTrueClusterCount) {
  const Matrix x = ThreeBlobs(20, 5);
  const auto curve = WcssCurve(x, 2, 6, 5, 8);
  int best_k = 0;
  double best = -2.0;
  for (const auto& p : curve) {
    const double s = Silhouette(x, p.model.Assign(x));
    if (s > best) {
      best = s;
      best_k = p.k;
    }
  }
  EXPECT_EQ(best_k, 3);
  EXPECT_GT(best, 0.8);
}

TEST(SilhouetteTest, HandComputed) {
  Matrix x(4, 1);
  x << 0, 1, 10, 11;
  const std::vector<int> labels{0, 0, 1, 1};
  // a = 1, b = mean(10, 11) for point 0.
  EXPECT_NEAR(SilhouetteSamples(x, labels)[0], 1.0 - 1.0 / 10.5, 1e-12);
  EXPECT_THROW(Silhouette(x, std::vector<int>{0, 0, 0, 0}), Error);
}

TEST(NoveltyTest, PercentileOfTrainingDistances) {
  const Matrix x = ThreeBlobs(20, 6);
  KMeansConfig c;
  c.k = 3;
  const auto m = KMeansFit(x, c);
  const auto t = FitNoveltyThreshold(x, m, 95.0);
  std::vector<double> d;
  for (Eigen::Index i = 0; i < x.rows(); ++i) d.push_back(m.NoveltyScore(Row(x, i)));
  EXPECT_DOUBLE_EQ(t.tau, Percentile(d, 95.0));
  const std::vector<double> far{50, 50};
  EXPECT_TRUE(IsOutlier(far, m, t));
  EXPECT_TRUE(ManualNoveltyThreshold(1.5).manual_override);
}

TEST(IsolationForestTest, AveragePathLength) {
  EXPECT_DOUBLE_EQ(AveragePathLength(1), 0.0);
  EXPECT_DOUBLE_EQ(AveragePathLength(2), 1.0);
  EXPECT_NEAR(AveragePathLength(10), 3.748880484475505, 1e-12);
  EXPECT_NEAR(AveragePathLength(256), 10.244770920119917, 1e-12);
  EXPECT_DOUBLE_EQ(AnomalyScoreFromPath(AveragePathLength(256), 256), 0.5);
}

TEST(IsolationForestTest, FarPointScoresHigherThanInlier) {
  const Matrix x = ThreeBlobs(60, 7);
  IsolationForestConfig c;
  c.seed = 1;
  const auto f = IsolationForestModel::Fit(x, c);
  EXPECT_EQ(f.height_limit(), 8);
  EXPECT_LE(f.MaxTreeHeight(), 8);
  const std::vector<double> far{40, -40};
  const std::vector<double> inlier{0.1, -0.1};
  EXPECT_GT(f.AnomalyScore(far), 0.6);
  EXPECT_LT(f.AnomalyScore(inlier), 0.5);
  EXPECT_TRUE(f.IsAnomaly(far));
}

TEST(IsolationForestTest, SubsampleCappedAtRows) {
  const Matrix x = ThreeBlobs(5, 8);
  const auto f = IsolationForestModel::Fit(x, {});
  EXPECT_EQ(f.subsample_size(), 15u);
  EXPECT_THROW(IsolationForestModel::Fit(Matrix::Zero(1, 2), {}), Error);
}

TEST(PcaTest, RecoversDominantAxis) {
  Rng rng(9);
  Matrix x(200, 3);
  for (int i = 0; i < 200; ++i) {
    const double t = 5.0 * rng.Normal();
    x.row(i) << t, t, 0.1 * rng.Normal();
  }
  const PcaModel p = PcaFit(x, 2);
  EXPECT_NEAR(std::abs(p.components(0, 0)), 1.0 / std::sqrt(2.0), 1e-2);
  EXPECT_GT(p.explained_variance_ratio[0], 0.99);
  EXPECT_NEAR((p.components * p.components.transpose() - Matrix::Identity(2, 2)).norm(), 0.0,
              1e-10);
  EXPECT_EQ(p.Project(x).cols(), 2);
  EXPECT_THROW(PcaFit(Matrix::Ones(5, 3), 2), Error);
}

}  // namespace
}  // namespace gazeguard
