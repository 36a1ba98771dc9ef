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

#include "gazeguard/neural_net.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>

#include "gazeguard/error.hpp"
#include "gazeguard/metrics.hpp"

namespace gazeguard {
namespace {

constexpr int kNumBn = 5;
constexpr int kNumDense = 5;
constexpr std::string_view kWeightsMagic = "GGW1";

// Tensor order: bn0, then (dense_d, bn_d) for d = 1..4, then dense5.
constexpr std::size_t BnBase(int b) { return b == 0 ? 0 : static_cast<std::size_t>(6 * b); }
constexpr std::size_t DenseBase(int d) { return static_cast<std::size_t>(4 + 6 * (d - 1)); }

Matrix LeakyRelu(const Matrix& u, double alpha) {
  return u.unaryExpr([alpha](double v) { return v > 0.0 ? v : alpha * v; });
}

Matrix LeakyReluGrad(const Matrix& u, const Matrix& dy, double alpha) {
  Matrix out(dy.rows(), dy.cols());
  for (Eigen::Index i = 0; i < dy.size(); ++i) {
    out.data()[i] = u.data()[i] > 0.0 ? dy.data()[i] : alpha * dy.data()[i];
  }
  return out;
}

Matrix Softmax(const Matrix& logits) {
  Matrix p(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    p.row(i) = (logits.row(i).array() - m).exp().matrix();
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

void AppendLe32(std::string& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<char>((v >> s) & 0xff));
}

std::uint64_t ReadLe(std::string_view bytes, std::size_t pos, int width) {
  std::uint64_t v = 0;
  for (int i = width - 1; i >= 0; --i) {
    v = (v << 8) | static_cast<unsigned char>(bytes[pos + static_cast<std::size_t>(i)]);
  }
  return v;
}

}  // namespace

Json NetConfig::ToJson() const {
  return Json{{"input_dim", input_dim},
              {"num_classes", num_classes},
              {"width1", width1},
              {"width2", width2},
              {"dropout", dropout},
              {"leaky_alpha", leaky_alpha},
              {"l2", l2},
              {"bn_momentum", bn_momentum},
              {"bn_epsilon", bn_epsilon},
              {"seed", seed}};
}

std::size_t ModelWeights::ParameterCount() const {
  std::size_t n = 0;
  for (const auto& s : layout) n += static_cast<std::size_t>(s.rows) * s.cols;
  return n;
}

std::string SerializeWeights(const ModelWeights& weights) {
  Require(weights.layout.size() == weights.tensors.size(), ErrorCode::kInvalidArgument,
          "weights layout and tensors differ in length");
  Json layout = Json::array();
  for (const auto& s : weights.layout) {
    layout.push_back(
        Json{{"name", s.name}, {"rows", s.rows}, {"cols", s.cols}, {"trainable", s.trainable}});
  }
  const std::string header =
      Json{{"format", "gazeguard.weights"}, {"version", 1}, {"layout", layout}}.dump();
  std::string out(kWeightsMagic);
  AppendLe32(out, static_cast<std::uint32_t>(header.size()));
  out += header;
  for (std::size_t t = 0; t < weights.tensors.size(); ++t) {
    const Matrix& m = weights.tensors[t];
    Require(m.rows() == weights.layout[t].rows && m.cols() == weights.layout[t].cols,
            ErrorCode::kLayoutMismatch, "tensor shape differs from its layout entry");
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const auto bits = std::bit_cast<std::uint64_t>(m.data()[i]);
      for (int s = 0; s < 64; s += 8) out.push_back(static_cast<char>((bits >> s) & 0xff));
    }
  }
  return out;
}

ModelWeights DeserializeWeights(std::string_view bytes) {
  Require(bytes.size() >= 8 && bytes.substr(0, 4) == kWeightsMagic, ErrorCode::kData,
          "not a weights container");
  const auto header_len = static_cast<std::size_t>(ReadLe(bytes, 4, 4));
  Require(bytes.size() >= 8 + header_len, ErrorCode::kData, "truncated weights header");
  ModelWeights w;
  try {
    const Json header = Json::parse(bytes.substr(8, header_len));
    Require(header.value("format", "") == "gazeguard.weights", ErrorCode::kData,
            "not a weights container");
    for (const auto& s : header.at("layout")) {
      w.layout.push_back({s.at("name").get<std::string>(), s.at("rows").get<int>(),
                          s.at("cols").get<int>(), s.at("trainable").get<bool>()});
    }
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kData, std::string("malformed weights header: ") + e.what());
  }
  std::size_t pos = 8 + header_len;
  Require(bytes.size() == pos + 8 * w.ParameterCount(), ErrorCode::kData,
          "weights payload size does not match its layout");
  for (const auto& s : w.layout) {
    Matrix m(s.rows, s.cols);
    for (Eigen::Index i = 0; i < m.size(); ++i, pos += 8) {
      m.data()[i] = std::bit_cast<double>(ReadLe(bytes, pos, 8));
    }
    w.tensors.push_back(std::move(m));
  }
  return w;
}

void WriteWeights(const std::filesystem::path& path, const ModelWeights& weights) {
  WriteFileAtomic(path, SerializeWeights(weights));
}

ModelWeights ReadWeights(const std::filesystem::path& path) {
  return DeserializeWeights(ReadFile(path));
}

NeuralNet NeuralNet::Build(const NetConfig& config) {
  Require(config.input_dim >= 1, ErrorCode::kInvalidArgument, "input_dim must be >= 1");
  Require(config.num_classes >= 2, ErrorCode::kInvalidArgument, "num_classes must be >= 2");
  Require(config.width1 >= 1 && config.width2 >= 1, ErrorCode::kInvalidArgument,
          "layer widths must be >= 1");
  for (double p : config.dropout) {
    Require(p >= 0.0 && p < 1.0, ErrorCode::kInvalidArgument, "dropout rates must lie in [0, 1)");
  }
  NeuralNet net;
  net.config_ = config;
  const int widths[kNumDense + 1] = {config.input_dim, config.width1, config.width2,
                                     config.width2,    config.width2, config.num_classes};
  auto add_bn = [&net](int b, int n) {
    const std::string p = "bn" + std::to_string(b) + ".";
    net.layout_.push_back({p + "gamma", 1, n, true});
    net.params_.push_back(Matrix::Ones(1, n));
    net.layout_.push_back({p + "beta", 1, n, true});
    net.params_.push_back(Matrix::Zero(1, n));
    net.layout_.push_back({p + "moving_mean", 1, n, false});
    net.params_.push_back(Matrix::Zero(1, n));
    net.layout_.push_back({p + "moving_variance", 1, n, false});
    net.params_.push_back(Matrix::Ones(1, n));
  };
  add_bn(0, config.input_dim);
  for (int d = 1; d <= kNumDense; ++d) {
    const int in = widths[d - 1];
    const int out = widths[d];
    const std::string p = "dense" + std::to_string(d) + ".";
    Rng rng(DeriveSeed(config.seed, "nn.init", static_cast<std::uint64_t>(d)));
    const double limit = std::sqrt(6.0 / (in + out));
    Matrix k(in, out);
    for (Eigen::Index i = 0; i < k.size(); ++i) k.data()[i] = rng.Uniform(-limit, limit);
    net.layout_.push_back({p + "kernel", in, out, true});
    net.params_.push_back(std::move(k));
    net.layout_.push_back({p + "bias", 1, out, true});
    net.params_.push_back(Matrix::Zero(1, out));
    if (d < kNumDense) add_bn(d, out);
  }
  return net;
}

Matrix NeuralNet::Forward(const Matrix& x, const ForwardOptions& options, ForwardTrace* trace) {
  Require(x.cols() == config_.input_dim, ErrorCode::kInvalidArgument,
          "network expects " + std::to_string(config_.input_dim) + " features, got " +
              std::to_string(x.cols()));
  Require(x.rows() >= 1, ErrorCode::kInvalidArgument, "forward pass on an empty batch");
  ForwardTrace local;
  ForwardTrace& tr = trace ? *trace : local;
  const double n = static_cast<double>(x.rows());

  auto bn = [&](int b, const Matrix& z) {
    const std::size_t base = BnBase(b);
    RowVector mu, var;
    if (options.use_batch_stats) {
      mu = z.colwise().mean();
      var = (z.rowwise() - mu).array().square().colwise().sum().matrix() / n;
      if (options.update_running_stats) {
        const double m = config_.bn_momentum;
        params_[base + 2] = m * params_[base + 2] + (1.0 - m) * mu;
        params_[base + 3] = m * params_[base + 3] + (1.0 - m) * var;
      }
    } else {
      mu = params_[base + 2];
      var = params_[base + 3];
    }
    tr.bn_inv_std[b] = (var.array() + config_.bn_epsilon).rsqrt().matrix();
    tr.bn_xhat[b] = ((z.rowwise() - mu).array().rowwise() * tr.bn_inv_std[b].array()).matrix();
    Matrix y = (tr.bn_xhat[b].array().rowwise() * params_[base].row(0).array()).matrix();
    y.rowwise() += params_[base + 1].row(0);
    return y;
  };
  auto dense = [&](int d, const Matrix& in) {
    tr.dense_in[d - 1] = in;
    Matrix z = in * params_[DenseBase(d)];
    z.rowwise() += params_[DenseBase(d) + 1].row(0);
    return z;
  };
  auto dropout = [&](int i, Matrix a) {
    const double p = config_.dropout[static_cast<std::size_t>(i)];
    if (!options.training || options.dropout_rng == nullptr || p == 0.0) {
      tr.drop_mask[i].resize(0, 0);
      return a;
    }
    tr.drop_mask[i].resize(a.rows(), a.cols());
    const double scale = 1.0 / (1.0 - p);
    for (Eigen::Index j = 0; j < a.size(); ++j) {
      tr.drop_mask[i].data()[j] = options.dropout_rng->Uniform() < p ? 0.0 : scale;
    }
    return Matrix(a.cwiseProduct(tr.drop_mask[i]));
  };
  const double alpha = config_.leaky_alpha;

  Matrix h = bn(0, x);
  for (int d = 1; d <= 4; ++d) {
    Matrix z = dense(d, h);
    tr.pre_act[d - 1] = bn(d, z);
    Matrix a = LeakyRelu(tr.pre_act[d - 1], alpha);
    if (d == 4) {
      a += tr.skip;
      tr.block_out = a;
    }
    h = dropout(d - 1, std::move(a));
    if (d == 2) tr.skip = h;
  }
  tr.probs = Softmax(dense(5, h));
  return tr.probs;
}

Matrix NeuralNet::Predict(const Matrix& x) const {
  NeuralNet copy = *this;
  return copy.Forward(x, ForwardOptions{});
}

std::vector<int> NeuralNet::PredictClasses(const Matrix& x) const {
  const Matrix p = Predict(x);
  std::vector<int> out(static_cast<std::size_t>(p.rows()));
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    Eigen::Index arg = 0;
    p.row(i).maxCoeff(&arg);
    out[static_cast<std::size_t>(i)] = static_cast<int>(arg);
  }
  return out;
}

double NeuralNet::L2Penalty() const {
  double total = 0.0;
  for (int d = 1; d <= 4; ++d) total += params_[DenseBase(d)].squaredNorm();
  return config_.l2 * total;
}

double NeuralNet::LossAndGradients(const Matrix& x, std::span<const int> y,
                                   const ForwardOptions& options, std::vector<Matrix>* grads,
                                   Matrix* probs_out) {
  Require(static_cast<std::size_t>(x.rows()) == y.size(), ErrorCode::kInvalidArgument,
          "features and labels differ in length");
  for (int label : y) {
    Require(label >= 0 && label < config_.num_classes, ErrorCode::kInvalidArgument,
            "label out of range");
  }
  ForwardTrace tr;
  const Matrix probs = Forward(x, options, &tr);
  const double loss = CrossEntropy(probs, y) + L2Penalty();
  if (probs_out) *probs_out = probs;
  if (!grads) return loss;

  const double n = static_cast<double>(x.rows());
  const double alpha = config_.leaky_alpha;
  grads->assign(params_.size(), Matrix());
  for (std::size_t i = 0; i < params_.size(); ++i) {
    (*grads)[i] = Matrix::Zero(params_[i].rows(), params_[i].cols());
  }
  auto dense_back = [&](int d, const Matrix& dz) {
    const std::size_t base = DenseBase(d);
    (*grads)[base] = tr.dense_in[d - 1].transpose() * dz;
    if (d <= 4) (*grads)[base] += 2.0 * config_.l2 * params_[base];
    (*grads)[base + 1] = dz.colwise().sum();
    return Matrix(dz * params_[base].transpose());
  };
  auto bn_back = [&](int b, const Matrix& dy) {
    const std::size_t base = BnBase(b);
    const Matrix& xhat = tr.bn_xhat[b];
    (*grads)[base] = dy.cwiseProduct(xhat).colwise().sum();
    (*grads)[base + 1] = dy.colwise().sum();
    const Matrix dxhat = (dy.array().rowwise() * params_[base].row(0).array()).matrix();
    if (!options.use_batch_stats) {
      return Matrix((dxhat.array().rowwise() * tr.bn_inv_std[b].array()).matrix());
    }
    const RowVector sum_dxhat = dxhat.colwise().sum();
    const RowVector sum_dxhat_xhat = dxhat.cwiseProduct(xhat).colwise().sum();
    Matrix dx = n * dxhat;
    dx.rowwise() -= sum_dxhat;
    dx -= (xhat.array().rowwise() * sum_dxhat_xhat.array()).matrix();
    return Matrix(((dx.array().rowwise() * tr.bn_inv_std[b].array()) / n).matrix());
  };
  auto drop_back = [&](int i, Matrix da) {
    if (tr.drop_mask[i].size() > 0) da = da.cwiseProduct(tr.drop_mask[i]);
    return da;
  };

  Matrix dlogits = probs;
  for (std::size_t i = 0; i < y.size(); ++i) dlogits(static_cast<Eigen::Index>(i), y[i]) -= 1.0;
  dlogits /= n;

  Matrix da = drop_back(3, dense_back(5, dlogits));
  const Matrix dskip_add = da;
  for (int d = 4; d >= 1; --d) {
    if (d < 4) {
      if (d == 2) da += dskip_add;  // skip is taken after dropout 1
      da = drop_back(d - 1, std::move(da));
    }
    const Matrix dz = bn_back(d, LeakyReluGrad(tr.pre_act[d - 1], da, alpha));
    da = dense_back(d, dz);
  }
  bn_back(0, da);
  return loss;
}

std::vector<std::size_t> NeuralNet::TrainableIndices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < layout_.size(); ++i) {
    if (layout_[i].trainable) out.push_back(i);
  }
  return out;
}

std::size_t NeuralNet::ParameterCount(bool trainable_only) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (!trainable_only || layout_[i].trainable) n += static_cast<std::size_t>(params_[i].size());
  }
  return n;
}

ModelWeights NeuralNet::GetWeights() const { return ModelWeights{layout_, params_}; }

void NeuralNet::SetWeights(const ModelWeights& weights) {
  Require(weights.layout == layout_ && weights.tensors.size() == params_.size(),
          ErrorCode::kLayoutMismatch, "weights layout does not match the model");
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Require(weights.tensors[i].rows() == params_[i].rows() &&
                weights.tensors[i].cols() == params_[i].cols(),
            ErrorCode::kLayoutMismatch, "tensor '" + layout_[i].name + "' has the wrong shape");
  }
  params_ = weights.tensors;
}

double Accuracy(const Matrix& probs, std::span<const int> y) {
  Require(static_cast<std::size_t>(probs.rows()) == y.size() && !y.empty(),
          ErrorCode::kInvalidArgument, "probabilities and labels differ in length");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    Eigen::Index arg = 0;
    probs.row(static_cast<Eigen::Index>(i)).maxCoeff(&arg);
    if (arg == y[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(y.size());
}

bool EarlyStopping::Update(int epoch, double val_loss) {
  improved_ = best_epoch_ < 0 || val_loss < best_;
  if (improved_) {
    best_ = val_loss;
    best_epoch_ = epoch;
    wait_ = 0;
    return false;
  }
  return ++wait_ >= patience_;
}

double ReduceLrOnPlateau::Update(double val_loss, double lr) {
  if (!has_best_ || val_loss < best_ - min_delta_) {
    has_best_ = true;
    best_ = val_loss;
    wait_ = 0;
    return lr;
  }
  if (++wait_ >= patience_ && lr > min_lr_) {
    wait_ = 0;
    return std::max(lr * factor_, min_lr_);
  }
  return lr;
}

Json TrainConfig::ToJson() const {
  return Json{{"epochs", epochs},
              {"batch_size", batch_size},
              {"optimizer", {{"name", "adam"},
                             {"learning_rate", learning_rate},
                             {"beta1", beta1},
                             {"beta2", beta2},
                             {"epsilon", adam_epsilon}}},
              {"early_stopping", {{"enabled", early_stopping},
                                  {"patience", early_stopping_patience},
                                  {"restore_best_weights", true}}},
              {"reduce_lr_on_plateau", {{"enabled", reduce_lr},
                                        {"patience", lr_patience},
                                        {"factor", lr_factor},
                                        {"min_lr", min_lr},
                                        {"min_delta", lr_min_delta}}},
              {"seed", seed}};
}

Json TrainHistory::ToJson() const {
  Json rows = Json::array();
  for (const auto& e : epochs) {
    rows.push_back(Json{{"epoch", e.epoch},
                        {"train_loss", e.train_loss},
                        {"train_accuracy", e.train_accuracy},
                        {"val_loss", e.val_loss},
                        {"val_accuracy", e.val_accuracy},
                        {"learning_rate", e.learning_rate}});
  }
  return Json{{"epochs", std::move(rows)},
              {"best_epoch", best_epoch},
              {"best_val_loss", best_val_loss},
              {"best_val_accuracy", best_val_accuracy},
              {"stopped_early", stopped_early}};
}

TrainHistory Train(NeuralNet& model, const Matrix& train_x, std::span<const int> train_y,
                   const Matrix& val_x, std::span<const int> val_y, const TrainConfig& config) {
  Require(train_x.rows() > 0 && static_cast<std::size_t>(train_x.rows()) == train_y.size(),
          ErrorCode::kInvalidArgument, "training set is empty or mislabelled");
  Require(val_x.rows() > 0 && static_cast<std::size_t>(val_x.rows()) == val_y.size(),
          ErrorCode::kInvalidArgument, "validation set is empty or mislabelled");
  Require(config.epochs >= 1 && config.batch_size >= 1, ErrorCode::kInvalidArgument,
          "epochs and batch_size must be >= 1");

  Rng shuffle_rng(DeriveSeed(config.seed, "nn.shuffle"));
  Rng dropout_rng(DeriveSeed(config.seed, "nn.dropout"));
  auto& params = model.tensors();
  const auto trainable = model.TrainableIndices();
  std::vector<Matrix> m1(params.size()), m2(params.size()), grads;
  for (std::size_t i : trainable) {
    m1[i] = Matrix::Zero(params[i].rows(), params[i].cols());
    m2[i] = Matrix::Zero(params[i].rows(), params[i].cols());
  }
  const auto n = static_cast<std::size_t>(train_x.rows());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainHistory history;
  EarlyStopping stopper(config.early_stopping_patience);
  ReduceLrOnPlateau plateau(config.lr_patience, config.lr_factor, config.min_lr,
                            config.lr_min_delta);
  ModelWeights best = model.GetWeights();
  double lr = config.learning_rate;
  long step = 0;
  const ForwardOptions train_mode{true, true, true, &dropout_rng};

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.Shuffle(std::span(order));
    double loss_sum = 0.0;
    double correct = 0.0;
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(n, start + static_cast<std::size_t>(config.batch_size));
      Matrix xb(static_cast<Eigen::Index>(end - start), train_x.cols());
      std::vector<int> yb(end - start);
      for (std::size_t i = start; i < end; ++i) {
        xb.row(static_cast<Eigen::Index>(i - start)) =
            train_x.row(static_cast<Eigen::Index>(order[i]));
        yb[i - start] = train_y[order[i]];
      }
      Matrix probs;
      const double loss = model.LossAndGradients(xb, yb, train_mode, &grads, &probs);
      loss_sum += loss * static_cast<double>(yb.size());
      correct += Accuracy(probs, yb) * static_cast<double>(yb.size());

      ++step;
      const double lr_t = lr * std::sqrt(1.0 - std::pow(config.beta2, step)) /
                          (1.0 - std::pow(config.beta1, step));
      for (std::size_t i : trainable) {
        m1[i] = config.beta1 * m1[i] + (1.0 - config.beta1) * grads[i];
        m2[i] = config.beta2 * m2[i] + (1.0 - config.beta2) * grads[i].cwiseAbs2();
        params[i].array() -=
            lr_t * m1[i].array() / (m2[i].array().sqrt() + config.adam_epsilon);
      }
    }
    const Matrix val_probs = model.Predict(val_x);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(n);
    rec.train_accuracy = correct / static_cast<double>(n);
    rec.val_loss = CrossEntropy(val_probs, val_y) + model.L2Penalty();
    rec.val_accuracy = Accuracy(val_probs, val_y);
    rec.learning_rate = lr;
    history.epochs.push_back(rec);

    const bool stop = stopper.Update(epoch, rec.val_loss);
    if (stopper.improved()) {
      best = model.GetWeights();
      history.best_epoch = epoch;
      history.best_val_loss = rec.val_loss;
      history.best_val_accuracy = rec.val_accuracy;
    }
    if (config.reduce_lr) lr = plateau.Update(rec.val_loss, lr);
    if (config.early_stopping && stop) {
      history.stopped_early = true;
      break;
    }
  }
  model.SetWeights(best);
  return history;
}

GradientCheckResult GradientCheck(NeuralNet& model, const Matrix& x, std::span<const int> y,
                                  std::size_t samples, std::uint64_t seed, double h) {
  const ForwardOptions opts{true, true, false, nullptr};
  auto signs = [&] {
    ForwardTrace tr;
    model.Forward(x, opts, &tr);
    std::vector<bool> out;
    for (const auto& u : tr.pre_act) {
      for (Eigen::Index i = 0; i < u.size(); ++i) out.push_back(u.data()[i] > 0.0);
    }
    return out;
  };
  std::vector<Matrix> grads;
  model.LossAndGradients(x, y, opts, &grads);
  const std::vector<bool> base_signs = signs();
  auto& params = model.tensors();
  const auto trainable = model.TrainableIndices();
  std::size_t total = 0;
  for (std::size_t i : trainable) total += static_cast<std::size_t>(params[i].size());

  Rng rng(seed);
  GradientCheckResult result;
  for (std::size_t s = 0; s < samples; ++s) {
    std::size_t flat = rng.Index(total);
    std::size_t t = 0;
    while (flat >= static_cast<std::size_t>(params[trainable[t]].size())) {
      flat -= static_cast<std::size_t>(params[trainable[t]].size());
      ++t;
    }
    double& w = params[trainable[t]].data()[flat];
    const double saved = w;
    w = saved + h;
    const double plus = model.LossAndGradients(x, y, opts, nullptr);
    bool kink = signs() != base_signs;
    w = saved - h;
    const double minus = model.LossAndGradients(x, y, opts, nullptr);
    kink = kink || signs() != base_signs;
    w = saved;
    if (kink) {
      ++result.skipped_kinks;
      continue;
    }
    const double numeric = (plus - minus) / (2.0 * h);
    const double analytic = grads[trainable[t]].data()[flat];
    const double rel = std::abs(analytic - numeric) /
                       std::max(kGradientCheckFloor, std::abs(analytic) + std::abs(numeric));
    result.max_relative_error = std::max(result.max_relative_error, rel);
    ++result.checked;
  }
  return result;
}

}  // namespace gazeguard
