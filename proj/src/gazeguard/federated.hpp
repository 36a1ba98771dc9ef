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

#ifndef GAZEGUARD_FEDERATED_HPP_
#define GAZEGUARD_FEDERATED_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gazeguard/io.hpp"
#include "gazeguard/matrix.hpp"
#include "gazeguard/neural_net.hpp"

namespace gazeguard {

/// One client's local data. Labels index the dummy-name space.
struct ClientDataset {
  int client_id = 0;
  Matrix x;
  std::vector<int> y;

  std::size_t size() const { return y.size(); }
};

/// Stratified near-equal split: per-class counts differ by at most one
/// between clients.
std::vector<ClientDataset> PartitionClients(const Matrix& x, std::span<const int> y,
                                            int n_clients, std::uint64_t seed);

struct LocalTrainResult {
  ModelWeights weights;
  double best_val_accuracy = 0.0;
  int best_fold = 0;
  std::vector<double> fold_accuracies;
  /// False when no global weights were given or their layout did not fit.
  bool started_from_global = false;
};

/// k-fold local training; each fold trains a fresh model (from the global
/// weights when their layout fits) and the best-validation fold wins, ties to
/// the lowest fold. RNG streams are keyed by (seed, round, fold).
LocalTrainResult LocalTrainKFold(const ClientDataset& client, const ModelWeights* global,
                                 const NetConfig& net, int n_folds, const TrainConfig& train,
                                 std::uint64_t seed, int round);

enum class FedAvgMode { kWeighted, kUniformDelta };

const char* FedAvgModeName(FedAvgMode mode);
FedAvgMode ParseFedAvgMode(std::string_view name);

/// n_s / sum(n) when sizes are given, otherwise 1/S.
std::vector<double> FedAvgCoefficients(std::size_t n_clients,
                                       std::optional<std::span<const std::size_t>> sizes);

/// Sum of c_s * w_s over every tensor, running statistics included.
ModelWeights FedAvg(std::span<const ModelWeights> weights,
                    std::optional<std::span<const std::size_t>> sizes = std::nullopt);

/// theta + sum of c_s * (theta_s - theta).
ModelWeights FedAvgDelta(const ModelWeights& global, std::span<const ModelWeights> weights,
                         std::optional<std::span<const std::size_t>> sizes = std::nullopt);

struct FederatedConfig {
  int n_rounds = 5;
  int n_folds = 3;
  FedAvgMode mode = FedAvgMode::kWeighted;
  NetConfig net;
  TrainConfig train;
  std::uint64_t seed = 42;
};

struct RoundRecord {
  int round = 0;  // 1-based
  std::vector<double> client_val_accuracy;
  std::vector<int> client_best_fold;
  double test_accuracy = 0.0;
  double test_loss = 0.0;
};

struct FederatedResult {
  std::vector<RoundRecord> rounds;
  ModelWeights global;
  std::vector<int> test_predictions;
};

using RoundCallback = std::function<void(const RoundRecord&, const ModelWeights&)>;

FederatedResult RunFederated(const std::vector<ClientDataset>& clients, const Matrix& test_x,
                             std::span<const int> test_y, const FederatedConfig& config,
                             const RoundCallback& on_round = {});

/// round, client_<i>_val_accuracy..., global_test_accuracy
std::string ProgressionCsv(std::span<const RoundRecord> rounds);

}  // namespace gazeguard

#endif  // GAZEGUARD_FEDERATED_HPP_
