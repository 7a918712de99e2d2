#include "strokeid/net.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "strokeid/errors.hpp"

namespace strokeid {

namespace {

constexpr std::uint64_t kInitStream = 0x696e6974;   // weight initialization
constexpr std::uint64_t kTrainStream = 0x74726169;  // shuffling + dropout

void check_finite(const Matrix& m, const char* where) {
  if (!m.allFinite()) throw NumericError(std::string("non-finite activation in ") + where);
}

Matrix relu(const Matrix& z) { return z.cwiseMax(0.0); }

// Row-wise softmax via log-sum-exp; also returns the per-row logsumexp so
// log-probabilities never go through a log(p) round trip.
Matrix softmax_rows(const Matrix& z, Vector& row_logsumexp) {
  const Vector row_max = z.rowwise().maxCoeff();
  Matrix e = (z.colwise() - row_max).array().exp();
  const Vector sums = e.rowwise().sum();
  row_logsumexp = (row_max.array() + sums.array().log()).matrix();
  e.array().colwise() /= sums.array();
  return e;
}

Matrix affine(const Matrix& x, const Matrix& w, const Vector& b) {
  Matrix z = x * w.transpose();
  z.rowwise() += b.transpose();
  return z;
}

void check_input(const MlpModel& model, const Matrix& batch) {
  if (batch.cols() != model.input_dim)
    throw ConfigError("batch has " + std::to_string(batch.cols()) +
                      " columns, model expects " + std::to_string(model.input_dim));
  if (batch.rows() == 0) throw ConfigError("empty batch");
}

// Tail of the network shared by both modes: hidden layers 2, 3 and the
// softmax output, starting from the post-dropout first hidden activation.
void forward_tail(const MlpModel& m, const Matrix& d1, Matrix& z2, Matrix& h2, Matrix& z3,
                  Matrix& h3, Matrix& z4, Matrix& probs, Vector& row_logsumexp) {
  z2 = affine(d1, m.weights[1], m.biases[1]);
  check_finite(z2, "hidden layer 2 affine");
  h2 = relu(z2);
  z3 = affine(h2, m.weights[2], m.biases[2]);
  check_finite(z3, "hidden layer 3 affine");
  h3 = relu(z3);
  z4 = affine(h3, m.weights[3], m.biases[3]);
  check_finite(z4, "output layer affine");
  probs = softmax_rows(z4, row_logsumexp);
}

}  // namespace

void TrainConfig::validate() const {
  if (learning_rate <= 0) throw ConfigError("learning rate must be positive");
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("batch size must be at least 1");
  if (!(bn_momentum > 0 && bn_momentum < 1)) throw ConfigError("bn momentum must be in (0, 1)");
  if (bn_epsilon <= 0) throw ConfigError("bn epsilon must be positive");
}

MlpModel init_model(int input_dim, const std::array<int, 3>& hidden_dims, int num_users,
                    std::uint64_t seed, double dropout_rate, double bn_epsilon,
                    double bn_momentum) {
  if (input_dim < 1 || num_users < 1) throw ConfigError("model dimensions must be positive");
  for (int h : hidden_dims)
    if (h < 1) throw ConfigError("hidden layer sizes must be positive");
  if (dropout_rate < 0 || dropout_rate >= 1) throw ConfigError("dropout rate must be in [0, 1)");

  MlpModel m;
  m.input_dim = input_dim;
  m.hidden_dims = hidden_dims;
  m.output_dim = num_users;
  m.dropout_rate = dropout_rate;
  m.bn_epsilon = bn_epsilon;
  m.bn_momentum = bn_momentum;

  const int dims[5] = {input_dim, hidden_dims[0], hidden_dims[1], hidden_dims[2], num_users};
  Rng rng(combine_seed(seed, kInitStream));
  for (int layer = 0; layer < 4; ++layer) {
    const int fan_in = dims[layer];
    const int fan_out = dims[layer + 1];
    const double std_dev = std::sqrt(2.0 / static_cast<double>(fan_in));
    Matrix w(fan_out, fan_in);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.normal(0.0, std_dev);
    m.weights.push_back(std::move(w));
    m.biases.push_back(Vector::Zero(fan_out));
  }

  m.bn_gamma = Vector::Ones(hidden_dims[0]);
  m.bn_beta = Vector::Zero(hidden_dims[0]);
  m.bn_running_mean = Vector::Zero(hidden_dims[0]);
  m.bn_running_var = Vector::Ones(hidden_dims[0]);
  return m;
}

ForwardCache forward_train(MlpModel& model, const Matrix& batch, Rng& rng) {
  check_input(model, batch);
  const auto n = static_cast<double>(batch.rows());

  ForwardCache c;
  c.input = batch;
  c.z1 = affine(batch, model.weights[0], model.biases[0]);
  check_finite(c.z1, "hidden layer 1 affine");

  // Batch statistics (population variance) for normalization; running stats
  // get the exponential-moving-average update.
  c.bn_mean = c.z1.colwise().mean().transpose();
  Matrix centered = c.z1.rowwise() - c.bn_mean.transpose();
  c.bn_var = (centered.array().square().colwise().sum() / n).matrix().transpose();
  c.bn_inv_std = (c.bn_var.array() + model.bn_epsilon).rsqrt().matrix();
  c.bn_xhat = (centered.array().rowwise() * c.bn_inv_std.transpose().array()).matrix();
  c.bn_out = ((c.bn_xhat.array().rowwise() * model.bn_gamma.transpose().array()).rowwise() +
              model.bn_beta.transpose().array())
                 .matrix();
  check_finite(c.bn_out, "hidden layer 1 batch norm");

  model.bn_running_mean =
      model.bn_momentum * model.bn_running_mean + (1.0 - model.bn_momentum) * c.bn_mean;
  model.bn_running_var =
      model.bn_momentum * model.bn_running_var + (1.0 - model.bn_momentum) * c.bn_var;

  c.h1 = relu(c.bn_out);

  if (model.dropout_rate > 0.0) {
    const double keep_scale = 1.0 / (1.0 - model.dropout_rate);
    c.dropout_mask.resize(c.h1.rows(), c.h1.cols());
    for (Eigen::Index r = 0; r < c.dropout_mask.rows(); ++r)
      for (Eigen::Index col = 0; col < c.dropout_mask.cols(); ++col)
        c.dropout_mask(r, col) = rng.uniform() >= model.dropout_rate ? keep_scale : 0.0;
    c.d1 = c.h1.cwiseProduct(c.dropout_mask);
  } else {
    c.d1 = c.h1;
  }

  forward_tail(model, c.d1, c.z2, c.h2, c.z3, c.h3, c.z4, c.probs, c.row_logsumexp);
  return c;
}

Matrix forward_infer(const MlpModel& model, const Matrix& batch) {
  check_input(model, batch);

  Matrix z1 = affine(batch, model.weights[0], model.biases[0]);
  check_finite(z1, "hidden layer 1 affine");
  const Vector inv_std = (model.bn_running_var.array() + model.bn_epsilon).rsqrt().matrix();
  Matrix bn = (((z1.rowwise() - model.bn_running_mean.transpose()).array().rowwise() *
                (inv_std.array() * model.bn_gamma.array()).transpose())
                   .rowwise() +
               model.bn_beta.transpose().array())
                  .matrix();
  check_finite(bn, "hidden layer 1 batch norm");
  Matrix d1 = relu(bn);

  Matrix z2, h2, z3, h3, z4, probs;
  Vector row_logsumexp;
  forward_tail(model, d1, z2, h2, z3, h3, z4, probs, row_logsumexp);
  return probs;
}

Matrix forward(MlpModel& model, const Matrix& batch, Mode mode, Rng* rng) {
  if (mode == Mode::Infer) return forward_infer(model, batch);
  if (rng == nullptr) throw ConfigError("train-mode forward requires an rng");
  return forward_train(model, batch, *rng).probs;
}

LossGrad loss_and_grad(MlpModel& model, const Matrix& batch, const std::vector<int>& labels,
                       const Vector& class_weights, Rng& rng) {
  if (static_cast<Eigen::Index>(labels.size()) != batch.rows())
    throw ConfigError("label count does not match batch rows");
  if (class_weights.size() != model.output_dim)
    throw ConfigError("class weight vector length does not match the output layer");
  for (int y : labels)
    if (y < 0 || y >= model.output_dim) throw ConfigError("label outside [0, K)");

  LossGrad out;
  out.cache = forward_train(model, batch, rng);
  const ForwardCache& c = out.cache;
  const Eigen::Index n = batch.rows();

  Vector sample_weights(n);
  for (Eigen::Index i = 0; i < n; ++i) sample_weights[i] = class_weights[labels[i]];
  const double weight_sum = sample_weights.sum();
  out.weight_sum = weight_sum;

  double nll = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    nll += sample_weights[i] * (c.row_logsumexp[i] - c.z4(i, labels[i]));
  out.loss = nll / weight_sum;

  // Softmax + weighted cross entropy: dz4 = (w_i / sum w) * (p - onehot).
  Matrix dz4 = c.probs;
  for (Eigen::Index i = 0; i < n; ++i) dz4(i, labels[i]) -= 1.0;
  dz4.array().colwise() *= (sample_weights.array() / weight_sum);

  Gradients& g = out.grads;
  g.weights.resize(4);
  g.biases.resize(4);

  g.weights[3] = dz4.transpose() * c.h3;
  g.biases[3] = dz4.colwise().sum().transpose();
  Matrix dh3 = dz4 * model.weights[3];

  Matrix dz3 = dh3.cwiseProduct((c.z3.array() > 0.0).cast<double>().matrix());
  g.weights[2] = dz3.transpose() * c.h2;
  g.biases[2] = dz3.colwise().sum().transpose();
  Matrix dh2 = dz3 * model.weights[2];

  Matrix dz2 = dh2.cwiseProduct((c.z2.array() > 0.0).cast<double>().matrix());
  g.weights[1] = dz2.transpose() * c.d1;
  g.biases[1] = dz2.colwise().sum().transpose();
  Matrix dd1 = dz2 * model.weights[1];

  Matrix dh1;
  if (c.dropout_mask.size() > 0)
    dh1 = dd1.cwiseProduct(c.dropout_mask);
  else
    dh1 = std::move(dd1);
  Matrix dbn = dh1.cwiseProduct((c.bn_out.array() > 0.0).cast<double>().matrix());

  g.bn_gamma = dbn.cwiseProduct(c.bn_xhat).colwise().sum().transpose();
  g.bn_beta = dbn.colwise().sum().transpose();

  // Backprop through the batch statistics.
  Matrix dxhat = (dbn.array().rowwise() * model.bn_gamma.transpose().array()).matrix();
  const auto nd = static_cast<double>(n);
  const Vector sum_dxhat = dxhat.colwise().sum().transpose();
  const Vector sum_dxhat_xhat = dxhat.cwiseProduct(c.bn_xhat).colwise().sum().transpose();
  Matrix dz1 =
      ((dxhat * nd).rowwise() - sum_dxhat.transpose()) -
      (c.bn_xhat.array().rowwise() * sum_dxhat_xhat.transpose().array()).matrix();
  dz1.array().rowwise() *= (c.bn_inv_std.transpose().array() / nd);

  g.weights[0] = dz1.transpose() * c.input;
  g.biases[0] = dz1.colwise().sum().transpose();
  return out;
}

EvalStats evaluate(const MlpModel& model, const FrameSet& frames, const Vector& class_weights) {
  if (frames.rows() == 0) throw ConfigError("cannot evaluate an empty frame set");
  constexpr Eigen::Index kChunk = 4096;

  double nll = 0.0;
  double weight_sum = 0.0;
  std::size_t correct = 0;

  for (Eigen::Index start = 0; start < frames.rows(); start += kChunk) {
    const Eigen::Index rows = std::min(kChunk, frames.rows() - start);
    const Matrix block = frames.inputs.middleRows(start, rows);
    const Matrix probs = forward_infer(model, block);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const int label = frames.labels[static_cast<std::size_t>(start + i)];
      const double w = class_weights[label];
      const double p = std::max(probs(i, label), 1e-300);
      nll += w * -std::log(p);
      weight_sum += w;

      Eigen::Index best = 0;
      probs.row(i).maxCoeff(&best);
      if (static_cast<int>(best) == label) ++correct;
    }
  }

  EvalStats stats;
  stats.loss = nll / weight_sum;
  stats.accuracy = static_cast<double>(correct) / static_cast<double>(frames.rows());
  return stats;
}

TrainingReport train(MlpModel& model, const FrameSet& train_set, const FrameSet& val_set,
                     const TrainConfig& config, const Vector& class_weights) {
  config.validate();
  if (train_set.rows() == 0 || val_set.rows() == 0)
    throw ConfigError("training and validation sets must be non-empty");

  model.bn_momentum = config.bn_momentum;
  model.bn_epsilon = config.bn_epsilon;

  Rng rng(combine_seed(config.seed, kTrainStream));
  const Eigen::Index n = train_set.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  TrainingReport report;
  double best_val = std::numeric_limits<double>::infinity();
  MlpModel best_model = model;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);

    double epoch_nll = 0.0;
    double epoch_weight = 0.0;
    for (Eigen::Index start = 0; start < n; start += config.batch_size) {
      const Eigen::Index rows = std::min<Eigen::Index>(config.batch_size, n - start);
      Matrix batch(rows, model.input_dim);
      std::vector<int> labels(static_cast<std::size_t>(rows));
      for (Eigen::Index i = 0; i < rows; ++i) {
        const Eigen::Index src = order[static_cast<std::size_t>(start + i)];
        batch.row(i) = train_set.inputs.row(src);
        labels[static_cast<std::size_t>(i)] = train_set.labels[static_cast<std::size_t>(src)];
      }

      LossGrad lg = loss_and_grad(model, batch, labels, class_weights, rng);
      if (!std::isfinite(lg.loss))
        throw DivergenceError(epoch, "non-finite loss at epoch " + std::to_string(epoch));

      for (int layer = 0; layer < 4; ++layer) {
        model.weights[layer] -= config.learning_rate * lg.grads.weights[layer];
        model.biases[layer] -= config.learning_rate * lg.grads.biases[layer];
      }
      model.bn_gamma -= config.learning_rate * lg.grads.bn_gamma;
      model.bn_beta -= config.learning_rate * lg.grads.bn_beta;

      epoch_nll += lg.loss * lg.weight_sum;
      epoch_weight += lg.weight_sum;
    }

    const EvalStats val = evaluate(model, val_set, class_weights);
    report.train_loss.push_back(epoch_nll / epoch_weight);
    report.val_loss.push_back(val.loss);
    report.val_accuracy.push_back(val.accuracy);

    if (val.loss < best_val) {
      best_val = val.loss;
      report.best_epoch = epoch;
      best_model = model;
    }
  }

  model = std::move(best_model);
  return report;
}

}  // namespace strokeid
