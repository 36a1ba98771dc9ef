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

#include <gtest/gtest.h>

#include "gazeguard/error.hpp"
#include "gazeguard/federated.hpp"
#include "gazeguard/rng.hpp"

namespace gazeguard {
namespace {

ModelWeights Constant(double v) {
  ModelWeights w;
  w.layout = {{"a", 2, 2, true}, {"b", 1, 3, false}};
  w.tensors = {Matrix::Constant(2, 2, v), Matrix::Constant(1, 3, -v)};
  return w;
}

TEST(FedAvgTest, Coefficients) {
  const std::vector<std::size_t> sizes{1, 3};
  EXPECT_EQ(FedAvgCoefficients(2, sizes), (std::vector<double>{0.25, 0.75}));
  EXPECT_EQ(FedAvgCoefficients(4, std::nullopt), std::vector<double>(4, 0.25));
  const std::vector<std::size_t> zero{0, 3};
  EXPECT_THROW(FedAvgCoefficients(2, zero), Error);
}

TEST(FedAvgTest, WeightedMean) {
  const std::vector<ModelWeights> ws{Constant(1.0), Constant(5.0)};
  const std::vector<std::size_t> sizes{3, 1};
  const ModelWeights avg = FedAvg(ws, sizes);
  EXPECT_TRUE(avg.tensors[0].isApprox(Matrix::Constant(2, 2, 2.0)));
  EXPECT_TRUE(avg.tensors[1].isApprox(Matrix::Constant(1, 3, -2.0)));
}

TEST(FedAvgTest, IdenticalClientsAreAFixedPoint) {
  const std::vector<ModelWeights> ws(3, Constant(0.7));
  const ModelWeights avg = FedAvg(ws);
  EXPECT_EQ(avg.tensors[0], ws[0].tensors[0]);
}

TEST(FedAvgTest, DeltaFormEqualsDirectAverage) {
  Rng rng(1);
  std::vector<ModelWeights> ws;
  for (int s = 0; s < 3; ++s) {
    ModelWeights w = Constant(0.0);
    for (auto& t : w.tensors) t = t.unaryExpr([&](double) { return rng.Normal(); });
    ws.push_back(w);
  }
  const ModelWeights global = Constant(3.0);
  const std::vector<std::size_t> sizes{2, 5, 9};
  for (auto sz : {std::optional<std::span<const std::size_t>>(sizes),
                  std::optional<std::span<const std::size_t>>()}) {
    const auto a = FedAvg(ws, sz);
    const auto b = FedAvgDelta(global, ws, sz);
    for (std::size_t i = 0; i < a.tensors.size(); ++i) {
      EXPECT_TRUE(a.tensors[i].isApprox(b.tensors[i], 1e-12));
    }
  }
}

TEST(FedAvgTest, LayoutMismatchIsRejected) {
  ModelWeights other = Constant(1.0);
  other.layout[0].name = "z";
  const std::vector<ModelWeights> ws{Constant(1.0), other};
  EXPECT_THROW(FedAvg(ws), Error);
}

TEST(FedAvgTest, ModeNames) {
  EXPECT_EQ(ParseFedAvgMode("weighted"), FedAvgMode::kWeighted);
  EXPECT_EQ(ParseFedAvgMode(FedAvgModeName(FedAvgMode::kUniformDelta)),
            FedAvgMode::kUniformDelta);
  EXPECT_THROW(ParseFedAvgMode("median"), Error);
}

struct Problem {
  Matrix x;
  std::vector<int> y;
};

Problem Separable(int per_class, int classes, std::uint64_t seed) {
  Rng rng(seed);
  Problem p;
  p.x.resize(per_class * classes, 7);
  for (int i = 0; i < per_class * classes; ++i) {
    const int c = i % classes;
    p.y.push_back(c);
    for (int j = 0; j < 7; ++j) p.x(i, j) = 0.3 * rng.Normal() + (j == c ? 3.0 : 0.0);
  }
  return p;
}

TEST(PartitionTest, StratifiedAndDisjoint) {
  const Problem p = Separable(20, 3, 1);
  const auto clients = PartitionClients(p.x, p.y, 2, 5);
  ASSERT_EQ(clients.size(), 2u);
  EXPECT_EQ(clients[0].size() + clients[1].size(), 60u);
  for (const auto& c : clients) {
    std::vector<int> per(3, 0);
    for (int y : c.y) ++per[y];
    for (int n : per) EXPECT_EQ(n, 10);
  }
  EXPECT_THROW(PartitionClients(p.x, p.y, 1, 5), Error);
}

TEST(RunFederatedTest, SmallProblemConvergesAndIsDeterministic) {
  const Problem train = Separable(40, 3, 2);
  const Problem test = Separable(20, 3, 3);
  FederatedConfig fc;
  fc.n_rounds = 2;
  fc.net.num_classes = 3;
  fc.net.width1 = 32;
  fc.net.width2 = 16;
  fc.train.epochs = 10;
  fc.train.batch_size = 16;
  const auto clients = PartitionClients(train.x, train.y, 2, 7);
  int callbacks = 0;
  const auto r1 = RunFederated(clients, test.x, test.y, fc,
                               [&](const RoundRecord&, const ModelWeights&) { ++callbacks; });
  EXPECT_EQ(callbacks, 2);
  ASSERT_EQ(r1.rounds.size(), 2u);
  EXPECT_GE(r1.rounds.back().test_accuracy, 0.9);
  EXPECT_EQ(r1.rounds[0].client_val_accuracy.size(), 2u);
  const auto r2 = RunFederated(clients, test.x, test.y, fc);
  EXPECT_EQ(r2.test_predictions, r1.test_predictions);
  EXPECT_EQ(r2.rounds.back().test_loss, r1.rounds.back().test_loss);
  const std::string csv = ProgressionCsv(r1.rounds);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "round,client_1_val_accuracy,client_2_val_accuracy,global_test_accuracy");
}

TEST(LocalTrainTest, FallsBackToScratchOnLayoutMismatch) {
  const Problem p = Separable(15, 3, 4);
  NetConfig net;
  net.num_classes = 3;
  net.width1 = 16;
  net.width2 = 8;
  NetConfig other = net;
  other.num_classes = 5;
  const ModelWeights wrong = NeuralNet::Build(other).GetWeights();
  TrainConfig tc;
  tc.epochs = 2;
  const ClientDataset c{1, p.x, p.y};
  const auto r = LocalTrainKFold(c, &wrong, net, 3, tc, 1, 2);
  EXPECT_FALSE(r.started_from_global);
  EXPECT_EQ(r.fold_accuracies.size(), 3u);
  const ModelWeights right = NeuralNet::Build(net).GetWeights();
  EXPECT_TRUE(LocalTrainKFold(c, &right, net, 3, tc, 1, 2).started_from_global);
}

}  // namespace
}  // namespace gazeguard
