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

#ifndef GAZEGUARD_NEURAL_NET_HPP_
#define GAZEGUARD_NEURAL_NET_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gazeguard/io.hpp"
#include "gazeguard/matrix.hpp"
#include "gazeguard/rng.hpp"

namespace gazeguard {

struct NetConfig {
  int input_dim = 7;
  int num_classes = 9;
  int width1 = 256;
  int width2 = 128;
  std::array<double, 4> dropout{0.3, 0.2, 0.2, 0.2};
  double leaky_alpha = 0.1;
  double l2 = 1e-3;
  double bn_momentum = 0.99;
  double bn_epsilon = 1e-3;
  std::uint64_t seed = 42;

  Json ToJson() const;
};

struct TensorSpec {
  std::string name;
  int rows = 0;
  int cols = 0;
  bool trainable = true;

  bool operator==(const TensorSpec&) const = default;
};

/// Ordered parameter tensors (including batch-norm running statistics) with
/// their layout descriptor.
struct ModelWeights {
  std::vector<TensorSpec> layout;
  std::vector<Matrix> tensors;

  bool SameLayout(const ModelWeights& other) const { return layout == other.layout; }
  std::size_t ParameterCount() const;
};

/// Binary container: "GGW1", u32 header length, JSON layout header, then the
/// tensors as little-endian doubles in layout order.
void WriteWeights(const std::filesystem::path& path, const ModelWeights& weights);
ModelWeights ReadWeights(const std::filesystem::path& path);
std::string SerializeWeights(const ModelWeights& weights);
ModelWeights DeserializeWeights(std::string_view bytes);

struct ForwardOptions {
  bool training = false;
  bool use_batch_stats = false;
  bool update_running_stats = false;
  Rng* dropout_rng = nullptr;  // null: dropout disabled
};

/// Intermediate activations kept for backprop.
struct ForwardTrace {
  std::array<Matrix, 5> dense_in;   // input of each dense layer
  std::array<Matrix, 5> bn_xhat;    // normalized batch-norm inputs
  std::array<RowVector, 5> bn_inv_std;
  std::array<Matrix, 4> pre_act;    // batch-norm outputs feeding LeakyReLU
  std::array<Matrix, 4> drop_mask;  // empty when no dropout was applied
  Matrix skip;                      // residual branch input
  Matrix block_out;                 // after the residual add, before dropout
  Matrix probs;
};

class NeuralNet {
 public:
  static NeuralNet Build(const NetConfig& config);

  const NetConfig& config() const { return config_; }

  /// Inference: running statistics, no dropout.
  Matrix Predict(const Matrix& x) const;
  std::vector<int> PredictClasses(const Matrix& x) const;

  Matrix Forward(const Matrix& x, const ForwardOptions& options, ForwardTrace* trace = nullptr);

  /// Mean cross-entropy plus the L2 penalty on the four hidden kernels.
  /// `grads` is aligned with tensors(); running statistics get zero gradients.
  double LossAndGradients(const Matrix& x, std::span<const int> y,
                          const ForwardOptions& options, std::vector<Matrix>* grads,
                          Matrix* probs_out = nullptr);
  double L2Penalty() const;

  std::vector<std::size_t> TrainableIndices() const;
  std::vector<Matrix>& tensors() { return params_; }
  const std::vector<Matrix>& tensors() const { return params_; }
  const std::vector<TensorSpec>& layout() const { return layout_; }
  std::size_t ParameterCount(bool trainable_only = false) const;

  ModelWeights GetWeights() const;
  /// Throws kLayoutMismatch when shapes or names differ.
  void SetWeights(const ModelWeights& weights);

 private:
  NetConfig config_;
  std::vector<TensorSpec> layout_;
  std::vector<Matrix> params_;
};

double Accuracy(const Matrix& probs, std::span<const int> y);

/// Keras-style early stopping on validation loss.
class EarlyStopping {
 public:
  explicit EarlyStopping(int patience) : patience_(patience) {}
  /// Returns true when training should stop after this epoch.
  bool Update(int epoch, double val_loss);
  bool improved() const { return improved_; }
  int best_epoch() const { return best_epoch_; }
  double best() const { return best_; }

 private:
  int patience_;
  int wait_ = 0;
  int best_epoch_ = -1;
  double best_ = 0.0;
  bool improved_ = false;
};

class ReduceLrOnPlateau {
 public:
  ReduceLrOnPlateau(int patience, double factor, double min_lr, double min_delta)
      : patience_(patience), factor_(factor), min_lr_(min_lr), min_delta_(min_delta) {}
  /// Returns the learning rate to use for the next epoch.
  double Update(double val_loss, double lr);

 private:
  int patience_;
  double factor_;
  double min_lr_;
  double min_delta_;
  int wait_ = 0;
  bool has_best_ = false;
  double best_ = 0.0;
};

struct TrainConfig {
  int epochs = 25;
  int batch_size = 64;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  bool early_stopping = true;
  int early_stopping_patience = 10;
  bool reduce_lr = true;
  int lr_patience = 5;
  double lr_factor = 0.5;
  double min_lr = 1e-6;
  double lr_min_delta = 1e-4;
  std::uint64_t seed = 42;

  Json ToJson() const;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
  double learning_rate = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = -1;
  double best_val_loss = 0.0;
  double best_val_accuracy = 0.0;
  bool stopped_early = false;

  Json ToJson() const;
};

/// Mini-batch Adam. The model ends with the weights of the lowest validation loss.
TrainHistory Train(NeuralNet& model, const Matrix& train_x, std::span<const int> train_y,
                   const Matrix& val_x, std::span<const int> val_y, const TrainConfig& config);

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  /// Perturbations that flipped a LeakyReLU input sign; the central difference
  /// straddles the kink there and is not compared.
  std::size_t skipped_kinks = 0;
};

/// Denominator floor of the relative error. Gradients that are structurally
/// zero (biases feeding batch norm) leave only ~1e-12 of rounding noise in the
/// central difference, which this floor keeps from reading as a large ratio.
inline constexpr double kGradientCheckFloor = 1e-6;

/// Central differences (step h) over `samples` randomly chosen trainable
/// parameters, with dropout off and batch statistics over the full input.
/// Relative error is |a - n| / max(kGradientCheckFloor, |a| + |n|).
GradientCheckResult GradientCheck(NeuralNet& model, const Matrix& x, std::span<const int> y,
                                  std::size_t samples, std::uint64_t seed, double h = 1e-4);

}  // namespace gazeguard

#endif  // GAZEGUARD_NEURAL_NET_HPP_
