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

#include "gazeguard/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "gazeguard/error.hpp"
#include "gazeguard/rng.hpp"

namespace gazeguard {
namespace {

struct LloydResult {
  Matrix centroids;
  double wcss = 0.0;
  std::vector<double> history;
};

int NearestCentroid(const Matrix& centroids, std::span<const double> x, double* best_sq) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < centroids.rows(); ++j) {
    const double d = SquaredDistance(Row(centroids, j), x);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(j);
    }
  }
  if (best_sq) *best_sq = best_d;
  return best;
}

Matrix PlusPlusSeeding(const Matrix& x, int k, Rng& rng) {
  const auto n = static_cast<std::size_t>(x.rows());
  Matrix centroids(k, x.cols());
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::size_t pick = rng.Index(n);
  for (int c = 0; c < k; ++c) {
    if (c > 0) {
      double total = 0.0;
      for (double v : d2) total += v;
      if (total > 0.0) {
        const double r = rng.Uniform() * total;
        double acc = 0.0;
        pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
          acc += d2[i];
          if (acc > r) {
            pick = i;
            break;
          }
        }
      } else {
        pick = rng.Index(n);
      }
    }
    centroids.row(c) = x.row(static_cast<Eigen::Index>(pick));
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], SquaredDistance(Row(x, static_cast<Eigen::Index>(i)),
                                              Row(centroids, c)));
    }
  }
  return centroids;
}

LloydResult Lloyd(const Matrix& x, Matrix centroids, int max_iter) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto k = static_cast<std::size_t>(centroids.rows());
  LloydResult result;
  std::vector<int> labels(n, -1), previous;
  std::vector<double> dist(n);
  for (int it = 0; it < max_iter; ++it) {
    double wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = NearestCentroid(centroids, Row(x, static_cast<Eigen::Index>(i)), &dist[i]);
      wcss += dist[i];
    }
    result.history.push_back(wcss);
    if (labels == previous) break;
    previous = labels;

    Matrix sums = Matrix::Zero(centroids.rows(), centroids.cols());
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums.row(labels[i]) += x.row(static_cast<Eigen::Index>(i));
      ++counts[static_cast<std::size_t>(labels[i])];
    }
    std::vector<bool> taken(n, false);
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[j] > 0) {
        centroids.row(static_cast<Eigen::Index>(j)) = sums.row(static_cast<Eigen::Index>(j)) /
                                                      static_cast<double>(counts[j]);
      }
    }
    // Empty clusters are reseeded at the point farthest from its centroid.
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[j] > 0) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (taken[i]) continue;
        const double d = SquaredDistance(Row(x, static_cast<Eigen::Index>(i)),
                                         Row(centroids, labels[i]));
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      taken[far] = true;
      centroids.row(static_cast<Eigen::Index>(j)) = x.row(static_cast<Eigen::Index>(far));
    }
  }
  result.wcss = Wcss(x, centroids);
  result.centroids = std::move(centroids);
  return result;
}

}  // namespace

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

double EuclideanDistance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(SquaredDistance(a, b));
}

std::span<const double> Row(const Matrix& x, Eigen::Index i) {
  return {x.data() + i * x.cols(), static_cast<std::size_t>(x.cols())};
}

double ConfidenceFromDistance(double distance) { return std::exp(-distance); }

KnnMatch Knn1Match(const Matrix& train, std::span<const std::int64_t> ids,
                   std::span<const double> query) {
  Require(train.rows() > 0, ErrorCode::kInvalidArgument, "knn needs a non-empty training set");
  Require(static_cast<std::size_t>(train.rows()) == ids.size(), ErrorCode::kInvalidArgument,
          "knn training rows and ids differ in length");
  Require(static_cast<std::size_t>(train.cols()) == query.size(), ErrorCode::kInvalidArgument,
          "knn query has " + std::to_string(query.size()) + " features, expected " +
              std::to_string(train.cols()));
  KnnMatch match;
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < train.rows(); ++i) {
    const double d = SquaredDistance(Row(train, i), query);
    if (d < best) {
      best = d;
      match.index = static_cast<std::size_t>(i);
    }
  }
  match.id = ids[match.index];
  match.distance = std::sqrt(best);
  match.confidence = ConfidenceFromDistance(match.distance);
  return match;
}

KMeansModel::KMeansModel(Matrix centroids, double wcss, int n_init, std::uint64_t seed,
                         std::vector<double> wcss_history)
    : centroids_(std::move(centroids)),
      wcss_(wcss),
      n_init_(n_init),
      seed_(seed),
      wcss_history_(std::move(wcss_history)) {}

int KMeansModel::Assign(std::span<const double> x) const {
  Require(centroids_.rows() > 0, ErrorCode::kInvalidArgument, "k-means model is not fitted");
  Require(static_cast<std::size_t>(centroids_.cols()) == x.size(), ErrorCode::kInvalidArgument,
          "k-means feature count mismatch");
  return NearestCentroid(centroids_, x, nullptr);
}

std::vector<int> KMeansModel::Assign(const Matrix& x) const {
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) out[static_cast<std::size_t>(i)] = Assign(Row(x, i));
  return out;
}

double KMeansModel::NoveltyScore(std::span<const double> x) const {
  Require(centroids_.rows() > 0, ErrorCode::kInvalidArgument, "k-means model is not fitted");
  Require(static_cast<std::size_t>(centroids_.cols()) == x.size(), ErrorCode::kInvalidArgument,
          "k-means feature count mismatch");
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < centroids_.rows(); ++j) {
    best = std::min(best, EuclideanDistance(Row(centroids_, j), x));
  }
  return best;
}

Json KMeansModel::ToJson() const {
  Json rows = Json::array();
  for (Eigen::Index j = 0; j < centroids_.rows(); ++j) {
    auto r = Row(centroids_, j);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return Json{{"format", "gazeguard.kmeans"}, {"version", 1}, {"k", k()},
              {"wcss", wcss_},                {"n_init", n_init_}, {"seed", seed_},
              {"centroids", rows}};
}

KMeansModel KMeansModel::FromJson(const Json& doc) {
  Require(doc.value("format", "") == "gazeguard.kmeans", ErrorCode::kData,
          "not a k-means document");
  const auto rows = doc.at("centroids").get<std::vector<std::vector<double>>>();
  Require(!rows.empty(), ErrorCode::kData, "k-means document without centroids");
  Matrix c(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    Require(rows[j].size() == rows[0].size(), ErrorCode::kData, "ragged centroid matrix");
    for (std::size_t f = 0; f < rows[j].size(); ++f) c(j, f) = rows[j][f];
  }
  return KMeansModel(std::move(c), doc.at("wcss").get<double>(), doc.at("n_init").get<int>(),
                     doc.at("seed").get<std::uint64_t>(), {});
}

double Wcss(const Matrix& x, const Matrix& centroids) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double best;
    NearestCentroid(centroids, Row(x, i), &best);
    total += best;
  }
  return total;
}

KMeansModel KMeansFit(const Matrix& x, const KMeansConfig& config) {
  return KMeansFit(x, config, nullptr);
}

KMeansModel KMeansFit(const Matrix& x, const KMeansConfig& config, const Matrix* warm_start) {
  Require(config.k >= 1, ErrorCode::kInvalidArgument, "k must be >= 1");
  Require(config.k <= x.rows(), ErrorCode::kInvalidArgument,
          "k = " + std::to_string(config.k) + " exceeds the " + std::to_string(x.rows()) +
              " available points");
  Require(config.n_init >= 1 && config.max_iter >= 1, ErrorCode::kInvalidArgument,
          "n_init and max_iter must be >= 1");
  std::optional<LloydResult> best;
  for (int r = 0; r < config.n_init; ++r) {
    Rng rng(DeriveSeed(config.seed, "kmeans.init", static_cast<std::uint64_t>(r)));
    auto result = Lloyd(x, PlusPlusSeeding(x, config.k, rng), config.max_iter);
    if (!best || result.wcss < best->wcss) best = std::move(result);
  }
  if (warm_start) {
    Require(warm_start->rows() == config.k && warm_start->cols() == x.cols(),
            ErrorCode::kInvalidArgument, "warm start has the wrong shape");
    auto result = Lloyd(x, *warm_start, config.max_iter);
    if (result.wcss < best->wcss) best = std::move(result);
  }
  return KMeansModel(std::move(best->centroids), best->wcss, config.n_init, config.seed,
                     std::move(best->history));
}

std::vector<WcssPoint> WcssCurve(const Matrix& x, int k_min, int k_max, int n_init,
                                 std::uint64_t seed) {
  Require(k_min >= 1 && k_min <= k_max, ErrorCode::kInvalidArgument, "empty k range");
  Require(k_max <= x.rows(), ErrorCode::kInvalidArgument, "k range exceeds the point count");
  std::vector<WcssPoint> curve;
  for (int k = k_min; k <= k_max; ++k) {
    KMeansConfig config{k, n_init, 300, seed};
    std::optional<Matrix> warm;
    if (!curve.empty()) {
      const Matrix& prev = curve.back().model.centroids();
      std::size_t far = 0;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        double d;
        NearestCentroid(prev, Row(x, i), &d);
        if (d > far_d) {
          far_d = d;
          far = static_cast<std::size_t>(i);
        }
      }
      warm = Matrix(k, x.cols());
      warm->topRows(k - 1) = prev;
      warm->row(k - 1) = x.row(static_cast<Eigen::Index>(far));
    }
    auto model = KMeansFit(x, config, warm ? &*warm : nullptr);
    curve.push_back({k, model.wcss(), std::move(model)});
  }
  return curve;
}

std::vector<double> SilhouetteSamples(const Matrix& x, std::span<const int> labels) {
  const auto n = static_cast<std::size_t>(x.rows());
  Require(labels.size() == n, ErrorCode::kInvalidArgument, "labels and rows differ in length");
  std::map<int, std::size_t> dense;
  for (int l : labels) dense.emplace(l, 0);
  Require(dense.size() >= 2, ErrorCode::kInvalidArgument,
          "silhouette needs at least two clusters");
  std::size_t next = 0;
  for (auto& [label, idx] : dense) idx = next++;
  const std::size_t k = dense.size();
  std::vector<std::size_t> cluster(n), size(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    cluster[i] = dense.at(labels[i]);
    ++size[cluster[i]];
  }
  std::vector<double> scores(n, 0.0), sums(k);
  for (std::size_t i = 0; i < n; ++i) {
    if (size[cluster[i]] == 1) continue;
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      sums[cluster[j]] += EuclideanDistance(Row(x, static_cast<Eigen::Index>(i)),
                                            Row(x, static_cast<Eigen::Index>(j)));
    }
    const double a = sums[cluster[i]] / static_cast<double>(size[cluster[i]] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c != cluster[i]) b = std::min(b, sums[c] / static_cast<double>(size[c]));
    }
    const double denom = std::max(a, b);
    scores[i] = denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return scores;
}

double Silhouette(const Matrix& x, std::span<const int> labels) {
  const auto s = SilhouetteSamples(x, labels);
  double total = 0.0;
  for (double v : s) total += v;
  return total / static_cast<double>(s.size());
}

double Percentile(std::vector<double> values, double percentile) {
  Require(!values.empty(), ErrorCode::kInvalidArgument, "percentile of an empty list");
  Require(percentile >= 0.0 && percentile <= 100.0, ErrorCode::kInvalidArgument,
          "percentile must lie in [0, 100]");
  std::sort(values.begin(), values.end());
  const double pos = percentile / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

Json NoveltyThreshold::ToJson() const {
  return Json{{"tau", tau},
              {"percentile", percentile},
              {"manual_override", manual_override},
              {"n_source_distances", source_distances.size()}};
}

NoveltyThreshold FitNoveltyThreshold(const Matrix& existing, const KMeansModel& model,
                                     double percentile) {
  Require(existing.rows() > 0, ErrorCode::kInvalidArgument,
          "novelty threshold needs existing samples");
  NoveltyThreshold t;
  t.percentile = percentile;
  t.source_distances.reserve(static_cast<std::size_t>(existing.rows()));
  for (Eigen::Index i = 0; i < existing.rows(); ++i) {
    t.source_distances.push_back(model.NoveltyScore(Row(existing, i)));
  }
  t.tau = Percentile(t.source_distances, percentile);
  return t;
}

NoveltyThreshold ManualNoveltyThreshold(double tau) {
  Require(tau >= 0.0, ErrorCode::kInvalidArgument, "tau must be >= 0");
  NoveltyThreshold t;
  t.tau = tau;
  t.manual_override = true;
  return t;
}

bool IsOutlier(std::span<const double> x, const KMeansModel& model,
               const NoveltyThreshold& threshold) {
  return model.NoveltyScore(x) > threshold.tau;
}

}  // namespace gazeguard
