#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <vector>

#include "gramsight/parallel.hpp"
#include "gramsight/training_config.hpp"
#include "gramsight/vocabulary.hpp"

namespace gramsight {

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(m)) without overflow
inline double log1p_exp(double m) {
  if (m > 0) return m + std::log1p(std::exp(-m));
  return std::log1p(std::exp(m));
}

struct Prediction {
  int label = 0;
  std::vector<double> probabilities;  // per class, in class_labels order
};

// One-vs-rest logistic regression: an independent binary sub-model per class,
// decision by argmax of the per-class probabilities.
struct LogRegOVR {
  std::vector<int> class_labels;                // ascending
  std::vector<std::vector<double>> weights;     // [class][feature]
  std::vector<double> intercepts;               // unregularized
  size_t n_features = 0;
  TrainingConfig config;

  size_t class_index(int label) const {
    auto it = std::lower_bound(class_labels.begin(), class_labels.end(), label);
    if (it == class_labels.end() || *it != label)
      throw std::invalid_argument("unknown class label " + std::to_string(label));
    return static_cast<size_t>(it - class_labels.begin());
  }

  double decision_score(size_t class_idx, const std::vector<uint32_t>& row) const {
    double z = intercepts[class_idx];
    const auto& beta = weights[class_idx];
    for (uint32_t col : row) z += beta[col];
    return z;
  }

  // odds = p/(1-p) = exp(z); computed in log space to dodge the p -> 1
  // cancellation
  double predicted_odds(size_t class_idx, const std::vector<uint32_t>& row) const {
    return std::exp(decision_score(class_idx, row));
  }
};

// Objective of one binary sub-model with y in {-1,+1}:
//   f(beta, b) = 0.5*||beta||^2 + C * sum_i log(1 + exp(-y_i*(beta.x_i + b)))
// The intercept is not regularized.
inline double logreg_objective(const std::vector<double>& beta, double intercept,
                               const std::vector<std::vector<uint32_t>>& rows,
                               const std::vector<int8_t>& y, double C) {
  double f = 0;
  for (double w : beta) f += 0.5 * w * w;
  for (size_t i = 0; i < rows.size(); ++i) {
    double z = intercept;
    for (uint32_t col : rows[i]) z += beta[col];
    f += C * log1p_exp(-static_cast<double>(y[i]) * z);
  }
  return f;
}

inline void logreg_gradient(const std::vector<double>& beta, double intercept,
                            const std::vector<std::vector<uint32_t>>& rows,
                            const std::vector<int8_t>& y, double C,
                            std::vector<double>& grad_beta, double& grad_intercept) {
  grad_beta.assign(beta.size(), 0.0);
  grad_intercept = 0.0;
  for (size_t i = 0; i < rows.size(); ++i) {
    double z = intercept;
    for (uint32_t col : rows[i]) z += beta[col];
    double yi = static_cast<double>(y[i]);
    double coef = C * -yi * sigmoid(-yi * z);
    for (uint32_t col : rows[i]) grad_beta[col] += coef;
    grad_intercept += coef;
  }
  for (size_t j = 0; j < beta.size(); ++j) grad_beta[j] += beta[j];
}

namespace detail {

// L-BFGS with Armijo backtracking over the packed vector [beta, intercept].
// Training stops when the objective's per-iteration relative decrease falls
// below `tolerance`, or after max_iterations.
inline void minimize_logreg(std::vector<double>& beta, double& intercept,
                            const std::vector<std::vector<uint32_t>>& rows,
                            const std::vector<int8_t>& y, double C, double tolerance,
                            size_t max_iterations) {
  const size_t dim = beta.size() + 1;
  auto eval = [&](const std::vector<double>& x, std::vector<double>& grad) {
    std::vector<double> b(x.begin(), x.end() - 1);
    std::vector<double> gb;
    double gi = 0;
    double f = logreg_objective(b, x.back(), rows, y, C);
    logreg_gradient(b, x.back(), rows, y, C, gb, gi);
    grad.assign(gb.begin(), gb.end());
    grad.push_back(gi);
    return f;
  };

  std::vector<double> x(dim, 0.0);
  std::copy(beta.begin(), beta.end(), x.begin());
  x.back() = intercept;

  std::vector<double> grad(dim), new_grad(dim);
  double f = eval(x, grad);

  const size_t memory = 8;
  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;

  auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0;
    for (size_t i = 0; i < a.size(); ++i) d += a[i] * b[i];
    return d;
  };

  for (size_t iter = 0; iter < max_iterations; ++iter) {
    // two-loop recursion
    std::vector<double> dir = grad;
    std::vector<double> alpha(s_hist.size());
    for (size_t k = s_hist.size(); k-- > 0;) {
      alpha[k] = rho_hist[k] * dot(s_hist[k], dir);
      for (size_t i = 0; i < dim; ++i) dir[i] -= alpha[k] * y_hist[k][i];
    }
    if (!s_hist.empty()) {
      double gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
      for (double& d : dir) d *= gamma;
    }
    for (size_t k = 0; k < s_hist.size(); ++k) {
      double beta_k = rho_hist[k] * dot(y_hist[k], dir);
      for (size_t i = 0; i < dim; ++i) dir[i] += s_hist[k][i] * (alpha[k] - beta_k);
    }
    for (double& d : dir) d = -d;

    double slope = dot(grad, dir);
    if (slope >= 0) {  // fall back to steepest descent
      for (size_t i = 0; i < dim; ++i) dir[i] = -grad[i];
      slope = -dot(grad, grad);
    }
    if (-slope < 1e-14) break;

    double step = 1.0;
    std::vector<double> x_new(dim);
    double f_new = f;
    for (int ls = 0; ls < 50; ++ls) {
      for (size_t i = 0; i < dim; ++i) x_new[i] = x[i] + step * dir[i];
      f_new = eval(x_new, new_grad);
      if (f_new <= f + 1e-4 * step * slope) break;
      step *= 0.5;
    }
    if (f_new >= f) break;  // line search failed

    std::vector<double> s(dim), yv(dim);
    for (size_t i = 0; i < dim; ++i) {
      s[i] = x_new[i] - x[i];
      yv[i] = new_grad[i] - grad[i];
    }
    double sy = dot(s, yv);
    if (sy > 1e-12) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(yv));
      rho_hist.push_back(1.0 / sy);
      if (s_hist.size() > memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }

    double rel_decrease = (f - f_new) / std::max(std::abs(f), 1e-12);
    x.swap(x_new);
    grad.swap(new_grad);
    f = f_new;
    if (rel_decrease < tolerance) break;
  }

  std::copy(x.begin(), x.end() - 1, beta.begin());
  intercept = x.back();
}

}  // namespace detail

inline LogRegOVR train_logreg_ovr(const BinaryFeatureMatrix& matrix, double C, double tolerance,
                                  uint64_t seed = 1, size_t max_iterations = 500,
                                  size_t threads = 0) {
  if (C <= 0 || tolerance <= 0)
    throw std::invalid_argument("train_logreg_ovr: C and tolerance must be positive");
  std::vector<int> classes(matrix.labels);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2) throw TrainingError("train_logreg_ovr: need at least two classes");

  LogRegOVR model;
  model.class_labels = classes;
  model.n_features = matrix.n_features;
  model.weights.assign(classes.size(), std::vector<double>(matrix.n_features, 0.0));
  model.intercepts.assign(classes.size(), 0.0);
  model.config.seed = seed;
  model.config.C = C;
  model.config.tolerance = tolerance;
  model.config.max_iterations = max_iterations;

  parallel_for(classes.size(), [&](size_t c) {
    std::vector<int8_t> y(matrix.n_samples());
    for (size_t i = 0; i < matrix.n_samples(); ++i)
      y[i] = matrix.labels[i] == classes[c] ? 1 : -1;
    detail::minimize_logreg(model.weights[c], model.intercepts[c], matrix.rows, y, C, tolerance,
                            max_iterations);
  }, threads);
  return model;
}

inline Prediction predict(const LogRegOVR& model, const std::vector<uint32_t>& row) {
  for (uint32_t col : row)
    if (col >= model.n_features)
      throw std::invalid_argument("predict: feature id out of range");
  Prediction out;
  out.probabilities.resize(model.class_labels.size());
  size_t best = 0;
  for (size_t c = 0; c < model.class_labels.size(); ++c) {
    out.probabilities[c] = sigmoid(model.decision_score(c, row));
    if (out.probabilities[c] > out.probabilities[best]) best = c;
  }
  out.label = model.class_labels[best];
  return out;
}

}  // namespace gramsight
