#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "strokeid/framing.hpp"
#include "strokeid/rng.hpp"
#include "strokeid/types.hpp"

namespace strokeid {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Mode { Train, Infer };

// Deep multilayer perceptron with exactly three hidden layers. Batch
// normalization and dropout act on the first hidden layer only; the output
// layer has one unit per enrolled user. Weights are stored (out x in).
struct MlpModel {
  int input_dim = 0;
  std::array<int, 3> hidden_dims{512, 256, 128};
  int output_dim = 0;

  std::vector<Matrix> weights;  // 4 affine layers
  std::vector<Vector> biases;

  Vector bn_gamma, bn_beta;
  Vector bn_running_mean, bn_running_var;

  double dropout_rate = 0.5;
  double bn_epsilon = 1e-5;
  double bn_momentum = 0.9;

  int num_layers() const { return static_cast<int>(weights.size()); }
};

struct TrainConfig {
  double learning_rate = 1e-3;
  int epochs = 50;
  int batch_size = 128;
  std::uint64_t seed = 1;
  double bn_momentum = 0.9;
  double bn_epsilon = 1e-5;

  void validate() const;  // throws ConfigError
};

struct TrainingReport {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  std::vector<double> val_accuracy;  // window-level
  int best_epoch = 0;                // argmin val_loss, earliest on ties
};

// He-initialized weights (zero-mean normal, std sqrt(2 / fan_in)), zero
// biases, identity batch-norm, running stats (0, 1). Deterministic per seed.
MlpModel init_model(int input_dim, const std::array<int, 3>& hidden_dims, int num_users,
                    std::uint64_t seed, double dropout_rate = 0.5,
                    double bn_epsilon = 1e-5, double bn_momentum = 0.9);

// Every intermediate needed to backpropagate one train-mode batch.
struct ForwardCache {
  Matrix input;
  Matrix z1;                        // first affine output, pre batch-norm
  Vector bn_mean, bn_var, bn_inv_std;
  Matrix bn_xhat, bn_out;
  Matrix h1;                        // post ReLU
  Matrix dropout_mask;              // 0 or 1/(1-r); empty when rate == 0
  Matrix d1;                        // post dropout
  Matrix z2, h2, z3, h3, z4;
  Matrix probs;
  Vector row_logsumexp;             // of z4, for stable log-probabilities
};

// Train-mode forward: batch statistics for the batch-norm layer (updating the
// running stats) and a fresh inverted-dropout mask.
ForwardCache forward_train(MlpModel& model, const Matrix& batch, Rng& rng);

// Infer-mode forward: running statistics, no dropout. Pure; rows are
// independent of each other.
Matrix forward_infer(const MlpModel& model, const Matrix& batch);

// Mode dispatcher. Train mode requires an rng.
Matrix forward(MlpModel& model, const Matrix& batch, Mode mode, Rng* rng = nullptr);

struct Gradients {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
  Vector bn_gamma, bn_beta;
};

struct LossGrad {
  double loss = 0.0;
  double weight_sum = 0.0;  // sum of per-sample class weights in the batch
  Gradients grads;
  ForwardCache cache;
};

// Class-weighted softmax cross entropy, normalized by the summed weights:
// loss = sum_i w_{y_i} * (-log p_i[y_i]) / sum_i w_{y_i}. Gradients cover all
// affine parameters plus batch-norm gamma/beta. Train-mode batch norm; the
// dropout mask is drawn once and reused in the backward pass.
LossGrad loss_and_grad(MlpModel& model, const Matrix& batch, const std::vector<int>& labels,
                       const Vector& class_weights, Rng& rng);

// Infer-mode weighted loss and window accuracy, evaluated in fixed-size
// chunks so large sets stay within memory.
struct EvalStats {
  double loss = 0.0;
  double accuracy = 0.0;
};
EvalStats evaluate(const MlpModel& model, const FrameSet& frames, const Vector& class_weights);

// Plain mini-batch SGD with per-epoch seeded shuffling. After each epoch the
// validation loss/accuracy are measured in Infer mode; the returned model
// holds the parameters of the best-validation-loss epoch. Throws
// DivergenceError when a batch loss goes non-finite.
TrainingReport train(MlpModel& model, const FrameSet& train_set, const FrameSet& val_set,
                     const TrainConfig& config, const Vector& class_weights);

// Everything needed to run the model later: parameters plus the framing
// configuration, normalization statistics and user roster it was trained with.
struct Checkpoint {
  MlpModel model;
  NormalizationStats stats;
  FramingConfig framing;
  std::vector<std::int64_t> user_ids;
};

// Versioned, self-describing text serialization; load(save(x)) reproduces
// forward outputs exactly. Throws CheckpointError on version mismatch,
// truncation, or inconsistent dimensions.
void save_checkpoint(const Checkpoint& ckpt, std::ostream& out);
Checkpoint load_checkpoint(std::istream& in);

}  // namespace strokeid
