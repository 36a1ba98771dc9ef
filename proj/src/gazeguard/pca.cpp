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

#include "gazeguard/pca.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "gazeguard/error.hpp"

namespace gazeguard {

PcaModel PcaFit(const Matrix& x, int n_components) {
  Require(x.rows() >= 2 && x.cols() >= 2, ErrorCode::kInvalidArgument,
          "PCA needs at least 2 rows and 2 columns");
  Require(n_components >= 1 && n_components <= x.cols(), ErrorCode::kInvalidArgument,
          "invalid number of PCA components");
  PcaModel model;
  model.mean = x.colwise().mean();
  const Matrix centered = x.rowwise() - model.mean;
  const Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(x.rows() - 1);
  const double total = cov.trace();
  Require(total > 0.0, ErrorCode::kData, "PCA input has zero variance");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  Require(solver.info() == Eigen::Success, ErrorCode::kInternal, "eigendecomposition failed");
  const auto d = x.cols();
  model.components.resize(n_components, d);
  for (int c = 0; c < n_components; ++c) {
    // Eigenvalues come back in ascending order.
    const Eigen::Index idx = d - 1 - c;
    Eigen::VectorXd v = solver.eigenvectors().col(idx);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    model.components.row(c) = v.transpose();
    model.explained_variance_ratio.push_back(std::max(0.0, solver.eigenvalues()(idx)) / total);
  }
  return model;
}

Matrix PcaModel::Project(const Matrix& x) const {
  Require(x.cols() == mean.size(), ErrorCode::kInvalidArgument, "PCA feature count mismatch");
  return (x.rowwise() - mean) * components.transpose();
}

Json PcaModel::ToJson() const {
  Json comps = Json::array();
  for (Eigen::Index c = 0; c < components.rows(); ++c) {
    std::vector<double> row(components.cols());
    for (Eigen::Index f = 0; f < components.cols(); ++f) row[f] = components(c, f);
    comps.push_back(row);
  }
  return Json{{"format", "gazeguard.pca"},
              {"mean", std::vector<double>(mean.data(), mean.data() + mean.size())},
              {"components", comps},
              {"explained_variance_ratio", explained_variance_ratio}};
}

}  // namespace gazeguard
