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

#ifndef GAZEGUARD_PCA_HPP_
#define GAZEGUARD_PCA_HPP_

#include <vector>

#include "gazeguard/io.hpp"
#include "gazeguard/matrix.hpp"

namespace gazeguard {

struct PcaModel {
  RowVector mean;
  Matrix components;  // n_components x d, orthonormal rows
  std::vector<double> explained_variance_ratio;

  Matrix Project(const Matrix& x) const;
  Json ToJson() const;
};

/// Eigendecomposition of the sample covariance. Each component's sign is fixed
/// so that its largest-magnitude entry is positive.
PcaModel PcaFit(const Matrix& x, int n_components = 2);

}  // namespace gazeguard

#endif  // GAZEGUARD_PCA_HPP_
