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

#ifndef GAZEGUARD_METRICS_HPP_
#define GAZEGUARD_METRICS_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gazeguard/io.hpp"
#include "gazeguard/matrix.hpp"

namespace gazeguard {

struct ClassMetrics {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  // Set when the metric had a zero denominator and was reported as 0.
  bool precision_undefined = false;
  bool recall_undefined = false;
};

struct EvalReport {
  double accuracy = 0.0;
  std::vector<ClassMetrics> per_class;
  /// confusion[t][p]: rows are true classes, columns predicted classes.
  std::vector<std::vector<std::size_t>> confusion;

  std::size_t Total() const;
  Json ToJson() const;
  /// Square CSV with the label in the first column and a matching header row.
  std::string ConfusionCsv() const;
};

EvalReport Evaluate(std::span<const int> y_true, std::span<const int> y_pred,
                    std::span<const std::string> labels);

/// Mean of -log p(true class), with probabilities clamped to [1e-12, 1].
double CrossEntropy(const Matrix& probabilities, std::span<const int> y_true);

}  // namespace gazeguard

#endif  // GAZEGUARD_METRICS_HPP_
