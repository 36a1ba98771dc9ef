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

#include "gazeguard/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "gazeguard/error.hpp"
#include "gazeguard/rng.hpp"

namespace gazeguard {
namespace {

// Groups sample indices by class label (ascending label order).
std::map<int, std::vector<std::size_t>> ByClass(std::span<const int> labels) {
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
  return groups;
}

}  // namespace

FittedScaler FittedScaler::Fit(const Matrix& x, ScalerKind kind) {
  Require(x.rows() > 0 && x.cols() > 0, ErrorCode::kInvalidArgument,
          "cannot fit a scaler on an empty matrix");
  FittedScaler s;
  s.kind_ = kind;
  const auto d = static_cast<std::size_t>(x.cols());
  s.offset_.assign(d, 0.0);
  s.scale_.assign(d, 0.0);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const auto col = x.col(j);
    if (kind == ScalerKind::kMinMax) {
      const double lo = col.minCoeff();
      const double hi = col.maxCoeff();
      s.offset_[j] = lo;
      s.scale_[j] = hi > lo ? hi - lo : 0.0;
    } else {
      const double mean = col.mean();
      double var = 0.0;
      for (Eigen::Index i = 0; i < x.rows(); ++i) var += (col(i) - mean) * (col(i) - mean);
      var /= static_cast<double>(x.rows());  // population convention
      s.offset_[j] = mean;
      s.scale_[j] = var > 0.0 ? std::sqrt(var) : 0.0;
    }
  }
  return s;
}

Matrix FittedScaler::Transform(const Matrix& x) const {
  Require(static_cast<std::size_t>(x.cols()) == offset_.size(), ErrorCode::kInvalidArgument,
          "scaler expects " + std::to_string(offset_.size()) + " features, got " +
              std::to_string(x.cols()));
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      out(i, j) = scale_[j] > 0.0 ? (x(i, j) - offset_[j]) / scale_[j] : 0.0;
    }
  }
  return out;
}

RowVector FittedScaler::TransformRow(std::span<const double> row) const {
  Require(row.size() == offset_.size(), ErrorCode::kInvalidArgument,
          "scaler feature count mismatch");
  RowVector out(static_cast<Eigen::Index>(row.size()));
  for (std::size_t j = 0; j < row.size(); ++j) {
    out(j) = scale_[j] > 0.0 ? (row[j] - offset_[j]) / scale_[j] : 0.0;
  }
  return out;
}

Json FittedScaler::ToJson() const {
  return Json{{"format", "gazeguard.scaler"},
              {"version", 1},
              {"kind", kind_ == ScalerKind::kMinMax ? "minmax" : "zscore"},
              {"offset", offset_},
              {"scale", scale_}};
}

FittedScaler FittedScaler::FromJson(const Json& doc) {
  Require(doc.value("format", "") == "gazeguard.scaler", ErrorCode::kData,
          "not a scaler document");
  FittedScaler s;
  const auto kind = doc.at("kind").get<std::string>();
  Require(kind == "minmax" || kind == "zscore", ErrorCode::kData, "bad scaler kind");
  s.kind_ = kind == "minmax" ? ScalerKind::kMinMax : ScalerKind::kZScore;
  s.offset_ = doc.at("offset").get<std::vector<double>>();
  s.scale_ = doc.at("scale").get<std::vector<double>>();
  Require(s.offset_.size() == s.scale_.size(), ErrorCode::kData, "scaler size mismatch");
  return s;
}

std::vector<std::size_t> FoldPlan::TrainIndices(std::size_t i) const {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    if (f != i) out.insert(out.end(), folds[f].begin(), folds[f].end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

SplitPlan SplitByLevel(const Dataset& dataset, const std::set<int>& train_levels,
                       const std::set<int>& test_levels) {
  for (int l : train_levels) {
    Require(!test_levels.contains(l), ErrorCode::kInvalidArgument,
            "level " + std::to_string(l) + " is in both train and test sets");
  }
  SplitPlan plan;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const int level = dataset[i].game_level;
    if (train_levels.contains(level)) {
      plan.train.push_back(i);
    } else if (test_levels.contains(level)) {
      plan.test.push_back(i);
    } else {
      ++plan.excluded;
    }
  }
  Require(!plan.train.empty(), ErrorCode::kData, "level split has an empty train side");
  Require(!plan.test.empty(), ErrorCode::kData, "level split has an empty test side");
  auto join = [](const std::set<int>& s) {
    std::string out;
    for (int l : s) out += (out.empty() ? "" : ",") + std::to_string(l);
    return out;
  };
  plan.description = "levels {" + join(train_levels) + "} vs {" + join(test_levels) + "}";
  return plan;
}

SplitPlan RandomStratifiedSplit(std::span<const int> labels, double train_frac,
                                std::uint64_t seed) {
  Require(train_frac > 0.0 && train_frac < 1.0, ErrorCode::kInvalidArgument,
          "train_frac must lie in (0, 1)");
  const auto groups = ByClass(labels);
  struct Alloc {
    int label;
    std::size_t count;
    std::size_t take;
    double remainder;
  };
  std::vector<Alloc> alloc;
  std::size_t assigned = 0;
  for (const auto& [label, idx] : groups) {
    Require(idx.size() >= 2, ErrorCode::kData,
            "class " + std::to_string(label) + " has fewer than 2 samples");
    const double ideal = train_frac * static_cast<double>(idx.size());
    const auto base = static_cast<std::size_t>(std::floor(ideal));
    alloc.push_back({label, idx.size(), base, ideal - static_cast<double>(base)});
    assigned += base;
  }
  const auto target = static_cast<std::size_t>(
      std::llround(train_frac * static_cast<double>(labels.size())));
  // Largest remainder first; ties go to the lower class index.
  std::vector<std::size_t> order(alloc.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return alloc[a].remainder > alloc[b].remainder;
  });
  for (std::size_t o = 0; assigned < target && o < order.size(); ++o) {
    if (alloc[order[o]].remainder > 0.0) {
      ++alloc[order[o]].take;
      ++assigned;
    }
  }
  SplitPlan plan;
  Rng rng(seed);
  for (auto& a : alloc) {
    a.take = std::clamp<std::size_t>(a.take, 1, a.count - 1);
    std::vector<std::size_t> idx = groups.at(a.label);
    rng.Shuffle(std::span<std::size_t>(idx));
    plan.train.insert(plan.train.end(), idx.begin(), idx.begin() + a.take);
    plan.test.insert(plan.test.end(), idx.begin() + a.take, idx.end());
  }
  std::sort(plan.train.begin(), plan.train.end());
  std::sort(plan.test.begin(), plan.test.end());
  plan.description = "stratified random split, train_frac=" + FormatDouble(train_frac) +
                     ", seed=" + std::to_string(seed);
  return plan;
}

FoldPlan StratifiedKFold(std::span<const int> labels, int k, std::uint64_t seed) {
  Require(k >= 2, ErrorCode::kInvalidArgument, "k must be >= 2");
  const auto groups = ByClass(labels);
  const auto folds = static_cast<std::size_t>(k);
  FoldPlan plan;
  plan.folds.resize(folds);
  Rng rng(seed);
  // Deal each shuffled class round-robin, continuing from where the previous
  // class stopped so fold sizes stay balanced as well.
  std::size_t cursor = 0;
  for (const auto& [label, idx] : groups) {
    Require(idx.size() >= folds, ErrorCode::kData,
            "class " + std::to_string(label) + " has fewer samples than folds");
    std::vector<std::size_t> shuffled = idx;
    rng.Shuffle(std::span<std::size_t>(shuffled));
    for (std::size_t i : shuffled) {
      plan.folds[cursor].push_back(i);
      cursor = (cursor + 1) % folds;
    }
  }
  for (auto& f : plan.folds) std::sort(f.begin(), f.end());
  return plan;
}

double CvMean(std::span<const double> scores) {
  Require(!scores.empty(), ErrorCode::kInvalidArgument, "cv_mean of an empty list");
  return std::accumulate(scores.begin(), scores.end(), 0.0) /
         static_cast<double>(scores.size());
}

Matrix SelectRows(const Matrix& x, std::span<const std::size_t> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

std::vector<int> SelectLabels(std::span<const int> labels, std::span<const std::size_t> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(labels[r]);
  return out;
}

}  // namespace gazeguard
