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

#include "gazeguard/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gazeguard/error.hpp"

namespace gazeguard {

std::size_t EvalReport::Total() const {
  std::size_t total = 0;
  for (const auto& row : confusion) {
    for (std::size_t c : row) total += c;
  }
  return total;
}

Json EvalReport::ToJson() const {
  Json classes = Json::array();
  for (const auto& m : per_class) {
    classes.push_back(Json{{"label", m.label},
                           {"precision", m.precision},
                           {"recall", m.recall},
                           {"f1", m.f1},
                           {"support", m.support},
                           {"precision_undefined", m.precision_undefined},
                           {"recall_undefined", m.recall_undefined}});
  }
  Json labels = Json::array();
  for (const auto& m : per_class) labels.push_back(m.label);
  return Json{{"accuracy", accuracy},
              {"n_samples", Total()},
              {"labels", labels},
              {"per_class", classes},
              {"confusion", confusion}};
}

std::string EvalReport::ConfusionCsv() const {
  std::ostringstream out;
  out << "true\\pred";
  for (const auto& m : per_class) out << ',' << CsvEscape(m.label);
  out << '\n';
  for (std::size_t t = 0; t < confusion.size(); ++t) {
    out << CsvEscape(per_class[t].label);
    for (std::size_t c : confusion[t]) out << ',' << c;
    out << '\n';
  }
  return out.str();
}

EvalReport Evaluate(std::span<const int> y_true, std::span<const int> y_pred,
                    std::span<const std::string> labels) {
  Require(y_true.size() == y_pred.size(), ErrorCode::kInvalidArgument,
          "y_true and y_pred differ in length");
  Require(!y_true.empty(), ErrorCode::kInvalidArgument, "cannot evaluate zero samples");
  const std::size_t c = labels.size();
  EvalReport report;
  report.confusion.assign(c, std::vector<std::size_t>(c, 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int t = y_true[i];
    const int p = y_pred[i];
    Require(t >= 0 && static_cast<std::size_t>(t) < c && p >= 0 &&
                static_cast<std::size_t>(p) < c,
            ErrorCode::kInvalidArgument, "label index outside the label set");
    ++report.confusion[t][p];
    if (t == p) ++correct;
  }
  report.accuracy = static_cast<double>(correct) / static_cast<double>(y_true.size());
  for (std::size_t k = 0; k < c; ++k) {
    ClassMetrics m;
    m.label = labels[k];
    std::size_t predicted = 0;
    for (std::size_t t = 0; t < c; ++t) predicted += report.confusion[t][k];
    for (std::size_t p = 0; p < c; ++p) m.support += report.confusion[k][p];
    const auto tp = static_cast<double>(report.confusion[k][k]);
    if (predicted > 0) {
      m.precision = tp / static_cast<double>(predicted);
    } else {
      m.precision_undefined = true;
    }
    if (m.support > 0) {
      m.recall = tp / static_cast<double>(m.support);
    } else {
      m.recall_undefined = true;
    }
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    report.per_class.push_back(std::move(m));
  }
  return report;
}

double CrossEntropy(const Matrix& probabilities, std::span<const int> y_true) {
  Require(static_cast<std::size_t>(probabilities.rows()) == y_true.size(),
          ErrorCode::kInvalidArgument, "probability rows and labels differ in length");
  Require(!y_true.empty(), ErrorCode::kInvalidArgument, "cross entropy of zero samples");
  double total = 0.0;
  for (Eigen::Index i = 0; i < probabilities.rows(); ++i) {
    const double row_sum = probabilities.row(i).sum();
    Require(std::abs(row_sum - 1.0) <= 1e-6, ErrorCode::kInvalidArgument,
            "probability row " + std::to_string(i) + " is not normalized");
    const int t = y_true[static_cast<std::size_t>(i)];
    Require(t >= 0 && t < probabilities.cols(), ErrorCode::kInvalidArgument,
            "label index outside the probability columns");
    total -= std::log(std::clamp(probabilities(i, t), 1e-12, 1.0));
  }
  return total / static_cast<double>(y_true.size());
}

}  // namespace gazeguard
