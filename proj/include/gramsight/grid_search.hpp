#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "gramsight/corpus.hpp"
#include "gramsight/forest.hpp"
#include "gramsight/logreg.hpp"
#include "gramsight/metrics.hpp"
#include "gramsight/mlp.hpp"
#include "gramsight/training_config.hpp"

namespace gramsight {

inline BinaryFeatureMatrix matrix_subset(const BinaryFeatureMatrix& matrix,
                                         const std::vector<size_t>& rows) {
  BinaryFeatureMatrix out;
  out.n_features = matrix.n_features;
  for (size_t r : rows) {
    out.sample_ids.push_back(matrix.sample_ids[r]);
    out.rows.push_back(matrix.rows[r]);
    out.labels.push_back(matrix.labels[r]);
  }
  return out;
}

using Classifier = std::function<int(const std::vector<uint32_t>&)>;
using Trainer = std::function<Classifier(const BinaryFeatureMatrix&, const TrainingConfig&)>;

inline Trainer make_trainer(ModelKind kind) {
  switch (kind) {
    case ModelKind::logreg:
      return [](const BinaryFeatureMatrix& m, const TrainingConfig& cfg) -> Classifier {
        auto model = std::make_shared<LogRegOVR>(
            train_logreg_ovr(m, cfg.C, cfg.tolerance, cfg.seed, cfg.max_iterations));
        return [model](const std::vector<uint32_t>& row) { return predict(*model, row).label; };
      };
    case ModelKind::forest:
      return [](const BinaryFeatureMatrix& m, const TrainingConfig& cfg) -> Classifier {
        auto model = std::make_shared<Forest>(
            train_forest(m, cfg.n_trees, cfg.min_leaf_fraction, cfg.seed));
        return [model](const std::vector<uint32_t>& row) { return predict(*model, row).label; };
      };
    case ModelKind::mlp:
      return [](const BinaryFeatureMatrix& m, const TrainingConfig& cfg) -> Classifier {
        auto model = std::make_shared<Mlp>(train_mlp(m, cfg));
        return [model](const std::vector<uint32_t>& row) { return predict(*model, row).label; };
      };
  }
  throw std::invalid_argument("make_trainer: bad kind");
}

struct GridSearchResult {
  TrainingConfig best;
  size_t best_index = 0;
  std::vector<double> mean_scores;  // per grid point, mean held-out balanced accuracy
};

// Picks the grid point with the highest mean held-out balanced accuracy over
// stratified folds; ties go to the earliest grid entry.
inline GridSearchResult grid_search_cv(const BinaryFeatureMatrix& matrix,
                                       const std::vector<TrainingConfig>& grid, size_t k_folds,
                                       uint64_t seed, const Trainer& trainer) {
  if (grid.empty()) throw std::invalid_argument("grid_search_cv: empty grid");
  if (k_folds < 2) throw std::invalid_argument("grid_search_cv: k_folds must be >= 2");

  LabeledCorpus corpus;
  for (size_t i = 0; i < matrix.n_samples(); ++i)
    corpus.samples.emplace_back(matrix.sample_ids[i], matrix.labels[i]);
  auto folds = stratified_partition(corpus, k_folds, seed);

  std::map<std::string, size_t> row_of;
  for (size_t i = 0; i < matrix.sample_ids.size(); ++i) row_of[matrix.sample_ids[i]] = i;

  GridSearchResult result;
  result.mean_scores.assign(grid.size(), 0.0);
  double best_score = -1.0;
  for (size_t g = 0; g < grid.size(); ++g) {
    double sum = 0;
    for (size_t f = 0; f < k_folds; ++f) {
      std::vector<size_t> test_rows, train_rows;
      for (const auto& id : folds[f]) test_rows.push_back(row_of.at(id));
      for (size_t other = 0; other < k_folds; ++other) {
        if (other == f) continue;
        for (const auto& id : folds[other]) train_rows.push_back(row_of.at(id));
      }
      auto classify = trainer(matrix_subset(matrix, train_rows), grid[g]);
      std::vector<int> predictions, truth;
      for (size_t r : test_rows) {
        predictions.push_back(classify(matrix.rows[r]));
        truth.push_back(matrix.labels[r]);
      }
      sum += detail::balanced_accuracy_lenient(predictions, truth);
    }
    result.mean_scores[g] = sum / static_cast<double>(k_folds);
    if (result.mean_scores[g] > best_score) {
      best_score = result.mean_scores[g];
      result.best_index = g;
    }
  }
  result.best = grid[result.best_index];
  return result;
}

}  // namespace gramsight
