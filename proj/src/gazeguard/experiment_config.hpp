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

#ifndef GAZEGUARD_EXPERIMENT_CONFIG_HPP_
#define GAZEGUARD_EXPERIMENT_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gazeguard/dataset.hpp"
#include "gazeguard/federated.hpp"
#include "gazeguard/io.hpp"

namespace gazeguard {

struct ForestParams {
  int n_estimators = 100;
  std::optional<int> max_depth;
  int min_samples_split = 2;
  std::optional<int> max_features;
};

struct TreeParams {
  std::optional<int> max_depth;
  int min_samples_split = 2;
};

/// Scenarios 1-3.
struct ScenarioParams {
  std::set<int> train_levels{1, 2};
  std::set<int> test_levels{3};
  double train_frac = 0.6;
  int cv_folds = 5;
  std::vector<std::string> models{"random_forest", "decision_tree"};
  ForestParams forest;
  TreeParams tree;
};

struct Scenario4Params {
  int k_min = 2;
  int k_max = 10;
  int n_init = 10;
  double novelty_percentile = 95.0;
  std::optional<double> tau;  // manual override of the percentile rule
  double confidence_threshold = 0.5;
  int iforest_trees = 100;
  std::size_t iforest_subsample = 256;
  double iforest_threshold = 0.5;
};

struct Phase2Params {
  int n_clients = 2;
  int rounds = 5;
  int folds = 3;
  int epochs = 25;
  int batch_size = 64;
  double learning_rate = 1e-3;
  int early_stopping_patience = 10;
  int lr_patience = 5;
  std::set<int> train_levels{1, 2};
  std::set<int> test_levels{3};
  FedAvgMode fedavg = FedAvgMode::kWeighted;
};

struct VaultParams {
  std::filesystem::path path;  // empty: <output_dir>/vault.json
  int kdf_iterations = 210000;
};

struct ExperimentConfig {
  std::uint64_t seed = 42;
  std::filesystem::path output_dir = "out";
  std::filesystem::path data_path;  // empty: synthetic data
  ColumnMap columns;
  SyntheticConfig synthetic;
  bool synthetic_seed_set = false;
  ScenarioParams scenario;
  Scenario4Params scenario4;
  Phase2Params phase2;
  VaultParams vault;

  /// Rejects unknown keys and ill-typed values with kInvalidArgument.
  static ExperimentConfig FromJson(const Json& doc);
  static ExperimentConfig Load(const std::filesystem::path& path);
  /// Resolved snapshot written into every report.
  Json ToJson() const;

  std::uint64_t DataSeed() const;
  std::filesystem::path VaultPath() const;
  void Validate() const;
};

}  // namespace gazeguard

#endif  // GAZEGUARD_EXPERIMENT_CONFIG_HPP_
