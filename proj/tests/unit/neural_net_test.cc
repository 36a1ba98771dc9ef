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

#include <cmath>

#include <gtest/gtest.h>

#include "gazeguard/error.hpp"
#include "gazeguard/neural_net.hpp"
#include "gazeguard/rng.hpp"
#include "test_util.hpp"

namespace gazeguard {
namespace {

struct Batch {
  Matrix x;
  std::vector<int> y;
};

Batch RandomBatch(int n, int dim, int classes, std::uint64_t seed) {
  Rng rng(seed);
  Batch b;
  b.x.resize(n, dim);
  for (int i = 0; i < n; ++i) {
    b.y.push_back(i % classes);
    for (int j = 0; j < dim; ++j) b.x(i, j) = rng.Normal() + (j == b.y.back() % dim ? 2.0 : 0.0);
  }
  return b;
}

TEST(NeuralNetTest, ParameterCounts) {
  const NeuralNet net = NeuralNet::Build({});
  EXPECT_EQ(net.ParameterCount(), 71717u);
  EXPECT_EQ(net.ParameterCount(true), 70423u);
  EXPECT_EQ(net.layout().size(), 30u);
  EXPECT_EQ(net.layout()[0].name.substr(0, 3), "bn0");
}

TEST(NeuralNetTest, BuildIsDeterministic) {
  NetConfig c;
  c.seed = 5;
  const auto a = NeuralNet::Build(c).GetWeights();
  const auto b = NeuralNet::Build(c).GetWeights();
  for (std::size_t i = 0; i < a.tensors.size(); ++i) EXPECT_EQ(a.tensors[i], b.tensors[i]);
}

TEST(NeuralNetTest, SoftmaxRowsSumToOne) {
  const NeuralNet net = NeuralNet::Build({});
  Batch b = RandomBatch(32, 7, 9, 1);
  b.x.row(0).setConstant(1e4);  // large logits must not overflow
  const Matrix p = net.Predict(b.x);
  ASSERT_EQ(p.cols(), 9);
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    EXPECT_NEAR(p.row(i).sum(), 1.0, 1e-12);
    EXPECT_GE(p.row(i).minCoeff(), 0.0);
  }
  EXPECT_TRUE(p.allFinite());
}

TEST(NeuralNetTest, GradientsMatchFiniteDifferences) {
  NetConfig c;
  c.seed = 3;
  NeuralNet net = NeuralNet::Build(c);
  const Batch b = RandomBatch(16, 7, 9, 2);
  const auto r = GradientCheck(net, b.x, b.y, 200, 4);
  EXPECT_GT(r.checked, 150u);
  EXPECT_LT(r.max_relative_error, 1e-4);
}

TEST(NeuralNetTest, InferenceIgnoresDropoutAndBatchStatistics) {
  const NeuralNet net = NeuralNet::Build({});
  const Batch b = RandomBatch(10, 7, 9, 3);
  const Matrix full = net.Predict(b.x);
  const Matrix one = net.Predict(b.x.topRows(1));
  EXPECT_TRUE(full.topRows(1).isApprox(one, 1e-12));
}

TEST(NeuralNetTest, OverfitsSmallBatch) {
  NetConfig nc;
  nc.seed = 11;
  NeuralNet net = NeuralNet::Build(nc);
  const Batch b = RandomBatch(64, 7, 9, 4);
  TrainConfig tc;
  tc.epochs = 200;
  tc.batch_size = 64;
  tc.learning_rate = 1e-2;
  tc.early_stopping = false;
  tc.reduce_lr = false;
  Train(net, b.x, b.y, b.x, b.y, tc);
  EXPECT_GE(Accuracy(net.Predict(b.x), b.y), 0.98);
}

TEST(NeuralNetTest, WeightsRoundTripThroughFile) {
  testing::TempDir dir;
  NetConfig c;
  c.seed = 8;
  const NeuralNet net = NeuralNet::Build(c);
  const ModelWeights w = net.GetWeights();
  WriteWeights(dir / "w.ggw", w);
  const ModelWeights back = ReadWeights(dir / "w.ggw");
  EXPECT_TRUE(back.SameLayout(w));
  for (std::size_t i = 0; i < w.tensors.size(); ++i) EXPECT_EQ(back.tensors[i], w.tensors[i]);
  NeuralNet other = NeuralNet::Build({});
  other.SetWeights(back);
  const Batch b = RandomBatch(5, 7, 9, 5);
  EXPECT_EQ(other.Predict(b.x), net.Predict(b.x));
}

TEST(NeuralNetTest, LayoutMismatchIsRejected) {
  NetConfig c;
  c.num_classes = 4;
  NeuralNet net = NeuralNet::Build({});
  try {
    net.SetWeights(NeuralNet::Build(c).GetWeights());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLayoutMismatch);
  }
}

TEST(NeuralNetTest, CorruptWeightsAreDataErrors) {
  const std::string bytes = SerializeWeights(NeuralNet::Build({}).GetWeights());
  EXPECT_THROW(DeserializeWeights("XXXX" + bytes.substr(4)), Error);
  EXPECT_THROW(DeserializeWeights(bytes.substr(0, bytes.size() - 8)), Error);
}

TEST(CallbacksTest, EarlyStoppingWaitsForPatience) {
  EarlyStopping es(2);
  EXPECT_FALSE(es.Update(0, 1.0));
  EXPECT_FALSE(es.Update(1, 0.9));
  EXPECT_FALSE(es.Update(2, 0.95));
  EXPECT_TRUE(es.Update(3, 0.91));
  EXPECT_EQ(es.best_epoch(), 1);
  EXPECT_DOUBLE_EQ(es.best(), 0.9);
}

TEST(CallbacksTest, ReduceLrHalvesAfterPatienceAndRespectsFloor) {
  ReduceLrOnPlateau r(2, 0.5, 0.3, 1e-4);
  double lr = 1.0;
  lr = r.Update(1.0, lr);
  lr = r.Update(0.99995, lr);  // within min_delta: no improvement
  EXPECT_DOUBLE_EQ(lr, 1.0);
  lr = r.Update(1.0, lr);
  EXPECT_DOUBLE_EQ(lr, 0.5);
  lr = r.Update(1.0, lr);
  lr = r.Update(1.0, lr);
  EXPECT_DOUBLE_EQ(lr, 0.3);
}

TEST(TrainTest, RestoresBestWeights) {
  NetConfig nc;
  nc.width1 = 32;
  nc.width2 = 16;
  NeuralNet net = NeuralNet::Build(nc);
  const Batch train = RandomBatch(60, 7, 9, 6);
  const Batch val = RandomBatch(30, 7, 9, 7);
  TrainConfig tc;
  tc.epochs = 15;
  const TrainHistory h = Train(net, train.x, train.y, val.x, val.y, tc);
  ASSERT_GE(h.best_epoch, 0);
  EXPECT_NEAR(Accuracy(net.Predict(val.x), val.y), h.best_val_accuracy, 1e-12);
}

}  // namespace
}  // namespace gazeguard
