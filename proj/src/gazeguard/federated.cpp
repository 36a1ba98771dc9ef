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

#include "gazeguard/federated.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "gazeguard/error.hpp"
#include "gazeguard/metrics.hpp"
#include "gazeguard/preprocess.hpp"
#include "gazeguard/rng.hpp"

namespace gazeguard {
namespace {

std::uint64_t FoldSeed(std::uint64_t seed, int round, int fold) {
  return DeriveSeed(DeriveSeed(seed, "fl.round", static_cast<std::uint64_t>(round)), "fl.fold",
                    static_cast<std::uint64_t>(fold));
}

void RequireSameLayout(std::span<const ModelWeights> weights) {
  Require(!weights.empty(), ErrorCode::kInvalidArgument, "nothing to aggregate");
  for (const auto& w : weights) {
    Require(w.SameLayout(weights[0]) && w.tensors.size() == weights[0].tensors.size(),
            ErrorCode::kLayoutMismatch, "client weights have different layouts");
  }
}

}  // namespace

std::vector<ClientDataset> PartitionClients(const Matrix& x, std::span<const int> y,
                                            int n_clients, std::uint64_t seed) {
  Require(n_clients >= 2, ErrorCode::kInvalidArgument, "at least two clients are required");
  Require(static_cast<std::size_t>(x.rows()) == y.size(), ErrorCode::kInvalidArgument,
          "features and labels differ in length");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i]].push_back(i);
  std::vector<std::vector<std::size_t>> assigned(static_cast<std::size_t>(n_clients));
  std::size_t cursor = 0;
  for (auto& [label, rows] : by_class) {
    Require(rows.size() >= static_cast<std::size_t>(n_clients), ErrorCode::kData,
            "class " + std::to_string(label) + " has " + std::to_string(rows.size()) +
                " samples, fewer than the " + std::to_string(n_clients) + " clients");
    Rng rng(DeriveSeed(seed, "clients.partition", static_cast<std::uint64_t>(label)));
    rng.Shuffle(std::span(rows));
    for (std::size_t r : rows) {
      assigned[cursor % assigned.size()].push_back(r);
      ++cursor;
    }
  }
  std::vector<ClientDataset> clients;
  for (std::size_t c = 0; c < assigned.size(); ++c) {
    std::sort(assigned[c].begin(), assigned[c].end());
    clients.push_back(
        {static_cast<int>(c + 1), SelectRows(x, assigned[c]), SelectLabels(y, assigned[c])});
  }
  return clients;
}

LocalTrainResult LocalTrainKFold(const ClientDataset& client, const ModelWeights* global,
                                 const NetConfig& net, int n_folds, const TrainConfig& train,
                                 std::uint64_t seed, int round) {
  Require(n_folds >= 2, ErrorCode::kInvalidArgument, "n_folds must be >= 2");
  const FoldPlan plan = StratifiedKFold(client.y, n_folds,
                                        DeriveSeed(seed, "fl.folds", static_cast<std::uint64_t>(round)));
  LocalTrainResult result;
  double best = -1.0;
  for (int f = 0; f < n_folds; ++f) {
    const auto val_rows = plan.folds[static_cast<std::size_t>(f)];
    const auto train_rows = plan.TrainIndices(static_cast<std::size_t>(f));
    NeuralNet model = NeuralNet::Build(net);
    bool from_global = false;
    if (global != nullptr) {
      try {
        model.SetWeights(*global);
        from_global = true;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kLayoutMismatch) throw;
      }
    }
    TrainConfig cfg = train;
    cfg.seed = FoldSeed(seed, round, f);
    const Matrix val_x = SelectRows(client.x, val_rows);
    const auto val_y = SelectLabels(client.y, val_rows);
    Train(model, SelectRows(client.x, train_rows), SelectLabels(client.y, train_rows), val_x,
          val_y, cfg);
    const double acc = Accuracy(model.Predict(val_x), val_y);
    result.fold_accuracies.push_back(acc);
    if (acc > best) {
      best = acc;
      result.best_fold = f;
      result.weights = model.GetWeights();
      result.started_from_global = from_global;
    }
  }
  result.best_val_accuracy = best;
  return result;
}

const char* FedAvgModeName(FedAvgMode mode) {
  return mode == FedAvgMode::kWeighted ? "weighted" : "uniform_delta";
}

FedAvgMode ParseFedAvgMode(std::string_view name) {
  if (name == "weighted") return FedAvgMode::kWeighted;
  if (name == "uniform_delta") return FedAvgMode::kUniformDelta;
  Fail(ErrorCode::kInvalidArgument, "unknown fedavg mode '" + std::string(name) + "'");
}

std::vector<double> FedAvgCoefficients(std::size_t n_clients,
                                       std::optional<std::span<const std::size_t>> sizes) {
  Require(n_clients >= 1, ErrorCode::kInvalidArgument, "nothing to aggregate");
  if (!sizes) return std::vector<double>(n_clients, 1.0 / static_cast<double>(n_clients));
  Require(sizes->size() == n_clients, ErrorCode::kInvalidArgument,
          "one dataset size per client is required");
  double total = 0.0;
  for (std::size_t s : *sizes) {
    Require(s > 0, ErrorCode::kInvalidArgument, "client dataset sizes must be > 0");
    total += static_cast<double>(s);
  }
  std::vector<double> c;
  for (std::size_t s : *sizes) c.push_back(static_cast<double>(s) / total);
  return c;
}

ModelWeights FedAvg(std::span<const ModelWeights> weights,
                    std::optional<std::span<const std::size_t>> sizes) {
  RequireSameLayout(weights);
  const auto c = FedAvgCoefficients(weights.size(), sizes);
  ModelWeights out = weights[0];
  for (std::size_t t = 0; t < out.tensors.size(); ++t) {
    out.tensors[t] = c[0] * weights[0].tensors[t];
    for (std::size_t s = 1; s < weights.size(); ++s) out.tensors[t] += c[s] * weights[s].tensors[t];
  }
  return out;
}

ModelWeights FedAvgDelta(const ModelWeights& global, std::span<const ModelWeights> weights,
                         std::optional<std::span<const std::size_t>> sizes) {
  RequireSameLayout(weights);
  Require(global.SameLayout(weights[0]), ErrorCode::kLayoutMismatch,
          "global weights have a different layout");
  const auto c = FedAvgCoefficients(weights.size(), sizes);
  ModelWeights out = global;
  for (std::size_t t = 0; t < out.tensors.size(); ++t) {
    for (std::size_t s = 0; s < weights.size(); ++s) {
      out.tensors[t] += c[s] * (weights[s].tensors[t] - global.tensors[t]);
    }
  }
  return out;
}

FederatedResult RunFederated(const std::vector<ClientDataset>& clients, const Matrix& test_x,
                             std::span<const int> test_y, const FederatedConfig& config,
                             const RoundCallback& on_round) {
  Require(clients.size() >= 2, ErrorCode::kInvalidArgument, "at least two clients are required");
  Require(config.n_rounds >= 1, ErrorCode::kInvalidArgument, "n_rounds must be >= 1");
  Require(test_x.rows() > 0, ErrorCode::kData, "federated test set is empty");
  FederatedResult result;
  // Round 1 has no broadcast model; the delta form averages against the shared
  // initialization every client starts from.
  ModelWeights global = NeuralNet::Build(config.net).GetWeights();
  bool have_global = false;
  std::vector<std::size_t> sizes;
  for (const auto& c : clients) sizes.push_back(c.size());

  for (int round = 1; round <= config.n_rounds; ++round) {
    RoundRecord record;
    record.round = round;
    std::vector<ModelWeights> local;
    for (const auto& client : clients) {
      try {
        auto r = LocalTrainKFold(client, have_global ? &global : nullptr, config.net,
                                 config.n_folds, config.train, config.seed, round);
        record.client_val_accuracy.push_back(r.best_val_accuracy);
        record.client_best_fold.push_back(r.best_fold);
        local.push_back(std::move(r.weights));
      } catch (const Error& e) {
        Fail(e.code(), "round " + std::to_string(round) + ", client " +
                           std::to_string(client.client_id) + ": " + e.what());
      }
    }
    global = config.mode == FedAvgMode::kWeighted
                 ? FedAvg(local, std::span<const std::size_t>(sizes))
                 : FedAvgDelta(global, local);
    have_global = true;

    NeuralNet model = NeuralNet::Build(config.net);
    model.SetWeights(global);
    const Matrix probs = model.Predict(test_x);
    record.test_accuracy = Accuracy(probs, test_y);
    record.test_loss = CrossEntropy(probs, test_y);
    result.rounds.push_back(record);
    if (on_round) on_round(record, global);
    if (round == config.n_rounds) result.test_predictions = model.PredictClasses(test_x);
  }
  result.global = std::move(global);
  return result;
}

std::string ProgressionCsv(std::span<const RoundRecord> rounds) {
  std::string out = "round";
  const std::size_t n_clients = rounds.empty() ? 0 : rounds[0].client_val_accuracy.size();
  for (std::size_t c = 0; c < n_clients; ++c) {
    out += ",client_" + std::to_string(c + 1) + "_val_accuracy";
  }
  out += ",global_test_accuracy\n";
  for (const auto& r : rounds) {
    out += std::to_string(r.round);
    for (double a : r.client_val_accuracy) out += "," + FormatDouble(a);
    out += "," + FormatDouble(r.test_accuracy) + "\n";
  }
  return out;
}

}  // namespace gazeguard
