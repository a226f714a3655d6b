#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "gramsight/logreg.hpp"  // sigmoid, Prediction
#include "gramsight/training_config.hpp"
#include "gramsight/vocabulary.hpp"

namespace gramsight {

// Feed-forward net with one tanh hidden layer and per-class sigmoid outputs.
// There are deliberately no bias terms anywhere: a zero input yields 0.5 for
// every class.
struct Mlp {
  std::vector<int> class_labels;
  size_t n_features = 0;
  size_t hidden = 40;
  std::vector<double> w1;  // [feature * hidden + h]
  std::vector<double> w2;  // [h * n_outputs + k]
  TrainingConfig config;

  size_t n_outputs() const { return class_labels.size(); }
  double w1_at(size_t feature, size_t h) const { return w1[feature * hidden + h]; }
  double w2_at(size_t h, size_t k) const { return w2[h * n_outputs() + k]; }
};

struct MlpActivations {
  std::vector<double> hidden_pre;    // z1 = x . W1
  std::vector<double> hidden_post;   // a1 = tanh(z1)
  std::vector<double> output_pre;    // z2 = a1 . W2
  std::vector<double> output_post;   // sigmoid(z2)
};

inline MlpActivations mlp_forward(const Mlp& model, const std::vector<uint32_t>& row) {
  for (uint32_t col : row)
    if (col >= model.n_features)
      throw std::invalid_argument("mlp_forward: feature id out of range");
  MlpActivations act;
  act.hidden_pre.assign(model.hidden, 0.0);
  for (uint32_t col : row)
    for (size_t h = 0; h < model.hidden; ++h) act.hidden_pre[h] += model.w1_at(col, h);
  act.hidden_post.resize(model.hidden);
  for (size_t h = 0; h < model.hidden; ++h) act.hidden_post[h] = std::tanh(act.hidden_pre[h]);
  act.output_pre.assign(model.n_outputs(), 0.0);
  for (size_t h = 0; h < model.hidden; ++h)
    for (size_t k = 0; k < model.n_outputs(); ++k)
      act.output_pre[k] += act.hidden_post[h] * model.w2_at(h, k);
  act.output_post.resize(model.n_outputs());
  for (size_t k = 0; k < model.n_outputs(); ++k) act.output_post[k] = sigmoid(act.output_pre[k]);
  return act;
}

// Summed per-output binary cross-entropy against one-hot targets.
inline double mlp_loss(const Mlp& model, const std::vector<std::vector<uint32_t>>& rows,
                       const std::vector<std::vector<double>>& targets) {
  double loss = 0;
  for (size_t i = 0; i < rows.size(); ++i) {
    auto act = mlp_forward(model, rows[i]);
    for (size_t k = 0; k < model.n_outputs(); ++k) {
      double z = act.output_pre[k];
      // -t*log(s(z)) - (1-t)*log(1-s(z)) = log(1+exp(z)) - t*z, stably
      loss += log1p_exp(z) - targets[i][k] * z;
    }
  }
  return loss;
}

// Gradient of the summed loss over `rows`, via backprop.
inline void mlp_gradient(const Mlp& model, const std::vector<std::vector<uint32_t>>& rows,
                         const std::vector<std::vector<double>>& targets,
                         std::vector<double>& grad_w1, std::vector<double>& grad_w2) {
  grad_w1.assign(model.w1.size(), 0.0);
  grad_w2.assign(model.w2.size(), 0.0);
  const size_t K = model.n_outputs();
  std::vector<double> delta2(K), delta1(model.hidden);
  for (size_t i = 0; i < rows.size(); ++i) {
    auto act = mlp_forward(model, rows[i]);
    for (size_t k = 0; k < K; ++k) delta2[k] = act.output_post[k] - targets[i][k];
    for (size_t h = 0; h < model.hidden; ++h) {
      double back = 0;
      for (size_t k = 0; k < K; ++k) {
        grad_w2[h * K + k] += act.hidden_post[h] * delta2[k];
        back += model.w2_at(h, k) * delta2[k];
      }
      delta1[h] = back * (1.0 - act.hidden_post[h] * act.hidden_post[h]);
    }
    for (uint32_t col : rows[i])
      for (size_t h = 0; h < model.hidden; ++h) grad_w1[col * model.hidden + h] += delta1[h];
  }
}

// Mini-batch gradient descent; weights start from a symmetric small-range
// uniform distribution seeded by the config.
inline Mlp train_mlp(const BinaryFeatureMatrix& matrix, const TrainingConfig& config) {
  std::vector<int> classes(matrix.labels);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2) throw TrainingError("train_mlp: need at least two classes");
  if (config.hidden < 1 || config.batch_size < 1 || config.learning_rate <= 0)
    throw std::invalid_argument("train_mlp: bad config");

  Mlp model;
  model.class_labels = classes;
  model.n_features = matrix.n_features;
  model.hidden = config.hidden;
  model.config = config;
  model.w1.resize(matrix.n_features * config.hidden);
  model.w2.resize(config.hidden * classes.size());

  std::mt19937_64 rng(mix64(config.seed));
  auto uniform_sym = [&](double range) {
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0,1)
    return (2.0 * u - 1.0) * range;
  };
  for (double& w : model.w1) w = uniform_sym(config.init_range);
  for (double& w : model.w2) w = uniform_sym(config.init_range);

  std::vector<std::vector<double>> targets(matrix.n_samples(),
                                           std::vector<double>(classes.size(), 0.0));
  for (size_t i = 0; i < matrix.n_samples(); ++i) {
    size_t k = std::lower_bound(classes.begin(), classes.end(), matrix.labels[i]) -
               classes.begin();
    targets[i][k] = 1.0;
  }

  std::vector<size_t> order(matrix.n_samples());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<double> grad_w1, grad_w2;
  std::vector<std::vector<uint32_t>> batch_rows;
  std::vector<std::vector<double>> batch_targets;
  for (size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      size_t end = std::min(start + config.batch_size, order.size());
      batch_rows.clear();
      batch_targets.clear();
      for (size_t i = start; i < end; ++i) {
        batch_rows.push_back(matrix.rows[order[i]]);
        batch_targets.push_back(targets[order[i]]);
      }
      mlp_gradient(model, batch_rows, batch_targets, grad_w1, grad_w2);
      double scale = config.learning_rate / static_cast<double>(batch_rows.size());
      for (size_t j = 0; j < model.w1.size(); ++j) model.w1[j] -= scale * grad_w1[j];
      for (size_t j = 0; j < model.w2.size(); ++j) model.w2[j] -= scale * grad_w2[j];
    }
    double probe = mlp_loss(model, {matrix.rows[0]}, {targets[0]});
    if (!std::isfinite(probe))
      throw TrainingError("train_mlp: loss diverged; try a smaller learning rate");
  }
  return model;
}

inline Prediction predict(const Mlp& model, const std::vector<uint32_t>& row) {
  auto act = mlp_forward(model, row);
  Prediction out;
  out.probabilities = act.output_post;
  size_t best = 0;
  for (size_t k = 1; k < out.probabilities.size(); ++k)
    if (out.probabilities[k] > out.probabilities[best]) best = k;
  out.label = model.class_labels[best];
  return out;
}

}  // namespace gramsight
