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

#ifndef GAZEGUARD_PREPROCESS_HPP_
#define GAZEGUARD_PREPROCESS_HPP_

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gazeguard/dataset.hpp"
#include "gazeguard/io.hpp"
#include "gazeguard/matrix.hpp"

namespace gazeguard {

enum class ScalerKind { kMinMax, kZScore };

/// Per-feature affine normalization fitted on a training partition:
/// transform(x) = (x - offset) / scale, or 0 where the fit column was constant.
class FittedScaler {
 public:
  static FittedScaler Fit(const Matrix& x, ScalerKind kind);

  Matrix Transform(const Matrix& x) const;
  RowVector TransformRow(std::span<const double> row) const;

  ScalerKind kind() const { return kind_; }
  const std::vector<double>& offset() const { return offset_; }
  const std::vector<double>& scale() const { return scale_; }
  std::size_t num_features() const { return offset_.size(); }

  Json ToJson() const;
  static FittedScaler FromJson(const Json& doc);

 private:
  ScalerKind kind_ = ScalerKind::kZScore;
  std::vector<double> offset_;
  std::vector<double> scale_;  // 0 marks a constant column
};

struct SplitPlan {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::size_t excluded = 0;
  std::string description;
};

struct FoldPlan {
  std::vector<std::vector<std::size_t>> folds;

  std::size_t k() const { return folds.size(); }
  /// Every index outside fold `i`, ascending.
  std::vector<std::size_t> TrainIndices(std::size_t i) const;
};

SplitPlan SplitByLevel(const Dataset& dataset, const std::set<int>& train_levels,
                       const std::set<int>& test_levels);

/// Largest-remainder per-class allocation of round(train_frac * N) training
/// samples; each class keeps at least one sample on both sides.
SplitPlan RandomStratifiedSplit(std::span<const int> labels, double train_frac,
                                std::uint64_t seed);

FoldPlan StratifiedKFold(std::span<const int> labels, int k, std::uint64_t seed);

double CvMean(std::span<const double> scores);

Matrix SelectRows(const Matrix& x, std::span<const std::size_t> rows);
std::vector<int> SelectLabels(std::span<const int> labels, std::span<const std::size_t> rows);

}  // namespace gazeguard

#endif  // GAZEGUARD_PREPROCESS_HPP_
