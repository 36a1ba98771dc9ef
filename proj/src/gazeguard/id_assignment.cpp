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

#include "gazeguard/id_assignment.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "gazeguard/crypto.hpp"
#include "gazeguard/error.hpp"

namespace gazeguard {
namespace {

constexpr std::pair<Strategy, const char*> kStrategyNames[] = {
    {Strategy::kSequential, "sequential"},     {Strategy::kSimilarity, "similarity"},
    {Strategy::kOutlier, "outlier"},           {Strategy::kClustering, "clustering"},
    {Strategy::kFeatureHash, "feature_hash"},  {Strategy::kEnsemble, "ensemble"},
};

std::int64_t NextSequentialId(std::span<const std::int64_t> existing_ids) {
  Require(!existing_ids.empty(), ErrorCode::kInvalidArgument,
          "sequential assignment needs at least one existing id");
  return *std::max_element(existing_ids.begin(), existing_ids.end()) + 1;
}

AssignmentDecision NewId(Strategy s, std::span<const std::int64_t> existing_ids) {
  AssignmentDecision d;
  d.strategy = s;
  d.is_new = true;
  d.id = NextSequentialId(existing_ids);
  return d;
}

AssignmentDecision Matched(Strategy s, std::int64_t id) {
  AssignmentDecision d;
  d.strategy = s;
  d.is_new = false;
  d.id = id;
  return d;
}

void RequireContext(const AssignmentContext& ctx, bool need_iforest, bool need_kmeans) {
  Require(ctx.known_x != nullptr && !ctx.known_ids.empty(), ErrorCode::kInvalidArgument,
          "assignment context has no known samples");
  Require(!need_iforest || ctx.iforest != nullptr, ErrorCode::kInvalidArgument,
          "assignment context has no isolation forest");
  Require(!need_kmeans || (ctx.kmeans != nullptr && ctx.novelty != nullptr),
          ErrorCode::kInvalidArgument, "assignment context has no k-means model");
}

}  // namespace

const char* StrategyName(Strategy strategy) {
  for (const auto& [s, name] : kStrategyNames) {
    if (s == strategy) return name;
  }
  return "unknown";
}

Strategy ParseStrategy(std::string_view name) {
  for (const auto& [s, n] : kStrategyNames) {
    if (name == n) return s;
  }
  Fail(ErrorCode::kInvalidArgument, "unknown strategy '" + std::string(name) + "'");
}

double AssignmentDecision::Evidence(std::string_view key) const {
  for (const auto& [k, v] : evidence) {
    if (k == key) return v;
  }
  Fail(ErrorCode::kNotFound, "no evidence named '" + std::string(key) + "'");
}

Json AssignmentDecision::ToJson() const {
  Json ev = Json::object();
  for (const auto& [k, v] : evidence) ev[k] = v;
  Json doc{{"strategy", StrategyName(strategy)},
           {"outcome", is_new ? "new_id" : "matched"},
           {"id", id},
           {"evidence", std::move(ev)}};
  if (!canonical_features.empty()) doc["canonical_features"] = canonical_features;
  if (!votes.empty()) {
    Json v = Json::object();
    for (const auto& [k, is_new_vote] : votes) v[k] = is_new_vote ? "new" : "match";
    doc["votes"] = std::move(v);
  }
  return doc;
}

AssignmentDecision SequentialAssign(std::span<const std::int64_t> existing_ids) {
  return NewId(Strategy::kSequential, existing_ids);
}

AssignmentDecision SimilarityAssign(std::span<const double> query, const Matrix& known_x,
                                    std::span<const std::int64_t> known_ids,
                                    double confidence_threshold) {
  Require(confidence_threshold > 0.0 && confidence_threshold < 1.0, ErrorCode::kInvalidArgument,
          "confidence threshold must lie in (0, 1)");
  const KnnMatch m = Knn1Match(known_x, known_ids, query);
  AssignmentDecision d = m.confidence >= confidence_threshold
                             ? Matched(Strategy::kSimilarity, m.id)
                             : NewId(Strategy::kSimilarity, known_ids);
  d.evidence = {{"distance", m.distance},
                {"confidence", m.confidence},
                {"threshold", confidence_threshold}};
  return d;
}

AssignmentDecision OutlierAssign(std::span<const double> query,
                                 const IsolationForestModel& iforest, const Matrix& known_x,
                                 std::span<const std::int64_t> known_ids) {
  const double score = iforest.AnomalyScore(query);
  const KnnMatch m = Knn1Match(known_x, known_ids, query);
  AssignmentDecision d = score > iforest.threshold() ? NewId(Strategy::kOutlier, known_ids)
                                                     : Matched(Strategy::kOutlier, m.id);
  d.evidence = {{"anomaly_score", score},
                {"threshold", iforest.threshold()},
                {"distance", m.distance}};
  return d;
}

AssignmentDecision ClusterAssign(std::span<const double> query, const KMeansModel& kmeans,
                                 const NoveltyThreshold& threshold,
                                 std::span<const int> known_clusters,
                                 std::span<const std::int64_t> known_ids) {
  Require(known_clusters.size() == known_ids.size(), ErrorCode::kInvalidArgument,
          "cluster labels and ids differ in length");
  const int cluster = kmeans.Assign(query);
  const double score = kmeans.NoveltyScore(query);
  std::map<std::int64_t, std::size_t> members;
  for (std::size_t i = 0; i < known_ids.size(); ++i) {
    if (known_clusters[i] == cluster) ++members[known_ids[i]];
  }
  AssignmentDecision d;
  if (score > threshold.tau || members.empty()) {
    d = NewId(Strategy::kClustering, known_ids);
  } else {
    // std::map iterates ids ascending, so the first maximum is the lowest id.
    auto best = members.begin();
    for (auto it = members.begin(); it != members.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    d = Matched(Strategy::kClustering, best->first);
  }
  d.evidence = {{"cluster", static_cast<double>(cluster)},
                {"novelty_score", score},
                {"tau", threshold.tau},
                {"cluster_known_members", static_cast<double>(members.size())}};
  return d;
}

std::string CanonicalFeatureString(std::span<const double> features) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < features.size(); ++i) {
    Require(std::isfinite(features[i]), ErrorCode::kInvalidArgument,
            "feature hash input must be finite");
    std::snprintf(buf, sizeof buf, "%.6f", features[i]);
    if (i > 0) out.push_back(',');
    out += buf;
  }
  return out;
}

std::uint32_t FeatureHashValue(std::string_view canonical) {
  return static_cast<std::uint32_t>(std::stoul(Md5Hex(canonical).substr(0, 8), nullptr, 16));
}

AssignmentDecision FeatureHashAssign(std::span<const double> features,
                                     std::span<const std::int64_t> existing_ids) {
  const std::set<std::int64_t> taken(existing_ids.begin(), existing_ids.end());
  const std::string canonical = CanonicalFeatureString(features);
  const std::uint32_t value = FeatureHashValue(canonical);
  std::int64_t id = value % kHashIdSpace;
  const std::int64_t start = id;
  std::int64_t probes = 0;
  while (taken.contains(id)) {
    id = (id + 1) % kHashIdSpace;
    ++probes;
    Require(id != start, ErrorCode::kInvalidArgument, "all hash ids are taken");
  }
  AssignmentDecision d;
  d.strategy = Strategy::kFeatureHash;
  d.is_new = true;
  d.id = id;
  d.canonical_features = canonical;
  d.evidence = {{"hash_value", static_cast<double>(value)},
                {"collision_probes", static_cast<double>(probes)}};
  return d;
}

AssignmentDecision EnsembleAssign(std::span<const double> query, const AssignmentContext& ctx) {
  RequireContext(ctx, true, true);
  const auto sim =
      SimilarityAssign(query, *ctx.known_x, ctx.known_ids, ctx.confidence_threshold);
  const auto out = OutlierAssign(query, *ctx.iforest, *ctx.known_x, ctx.known_ids);
  const auto clu =
      ClusterAssign(query, *ctx.kmeans, *ctx.novelty, ctx.known_clusters, ctx.known_ids);
  const int new_votes = int{sim.is_new} + int{out.is_new} + int{clu.is_new};
  AssignmentDecision d = new_votes >= 2 ? NewId(Strategy::kEnsemble, ctx.known_ids)
                                        : Matched(Strategy::kEnsemble, sim.id);
  if (!d.is_new && sim.is_new) {
    d.id = Knn1Match(*ctx.known_x, ctx.known_ids, query).id;
  }
  d.votes = {{"similarity", sim.is_new}, {"outlier", out.is_new}, {"clustering", clu.is_new}};
  d.evidence = {{"confidence", sim.Evidence("confidence")},
                {"anomaly_score", out.Evidence("anomaly_score")},
                {"novelty_score", clu.Evidence("novelty_score")},
                {"new_votes", static_cast<double>(new_votes)}};
  return d;
}

AssignmentDecision Assign(Strategy strategy, std::span<const double> query,
                          const AssignmentContext& ctx) {
  switch (strategy) {
    case Strategy::kSequential:
      return SequentialAssign(ctx.known_ids);
    case Strategy::kSimilarity:
      RequireContext(ctx, false, false);
      return SimilarityAssign(query, *ctx.known_x, ctx.known_ids, ctx.confidence_threshold);
    case Strategy::kOutlier:
      RequireContext(ctx, true, false);
      return OutlierAssign(query, *ctx.iforest, *ctx.known_x, ctx.known_ids);
    case Strategy::kClustering:
      RequireContext(ctx, false, true);
      return ClusterAssign(query, *ctx.kmeans, *ctx.novelty, ctx.known_clusters, ctx.known_ids);
    case Strategy::kFeatureHash:
      return FeatureHashAssign(query, ctx.known_ids);
    case Strategy::kEnsemble:
      return EnsembleAssign(query, ctx);
  }
  Fail(ErrorCode::kInternal, "unhandled strategy");
}

}  // namespace gazeguard
