#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gramsight {

struct TrainingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ModelKind { logreg, forest, mlp };

inline std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::logreg: return "logreg";
    case ModelKind::forest: return "forest";
    case ModelKind::mlp: return "mlp";
  }
  return "?";
}

inline ModelKind model_kind_from_string(const std::string& s) {
  if (s == "logreg") return ModelKind::logreg;
  if (s == "forest") return ModelKind::forest;
  if (s == "mlp") return ModelKind::mlp;
  throw std::invalid_argument("unknown model kind: " + s);
}

// Hyperparameters for all three model kinds; a grid is a list of these.
struct TrainingConfig {
  uint64_t seed = 1;
  // logistic regression
  double C = 10.0;
  double tolerance = 1e-4;
  size_t max_iterations = 500;
  // forest
  size_t n_trees = 300;
  double min_leaf_fraction = 0.0001;
  // mlp
  size_t hidden = 40;
  double learning_rate = 0.01;
  size_t max_epochs = 200;
  size_t batch_size = 32;
  double init_range = 0.05;
  // cross validation
  size_t k_folds = 5;

  bool operator==(const TrainingConfig&) const = default;
};

}  // namespace gramsight
