#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "gramsight/logreg.hpp"  // Prediction
#include "gramsight/parallel.hpp"
#include "gramsight/training_config.hpp"
#include "gramsight/vocabulary.hpp"

namespace gramsight {

// Binary features split at threshold 0.5: absent goes left, present right.
struct TreeNode {
  int32_t feature = -1;  // -1 marks a leaf
  uint32_t left = 0;
  uint32_t right = 0;
  uint32_t count = 0;        // training samples reaching the node
  std::vector<double> dist;  // class distribution at the node, sums to 1
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // root at index 0

  bool is_leaf(uint32_t id) const { return nodes[id].feature < 0; }

  uint32_t leaf_for(const std::vector<uint32_t>& row) const {
    uint32_t id = 0;
    while (!is_leaf(id)) {
      bool present = std::binary_search(row.begin(), row.end(),
                                        static_cast<uint32_t>(nodes[id].feature));
      id = present ? nodes[id].right : nodes[id].left;
    }
    return id;
  }
};

struct Forest {
  std::vector<int> class_labels;
  std::vector<DecisionTree> trees;
  size_t n_features = 0;
  TrainingConfig config;
};

namespace detail {

inline double gini(const std::vector<double>& dist) {
  double g = 1.0;
  for (double p : dist) g -= p * p;
  return g;
}

struct TreeBuilder {
  const BinaryFeatureMatrix& matrix;
  const std::vector<int>& classes;
  size_t min_count;
  size_t candidates_per_node;
  std::mt19937_64 rng;
  DecisionTree tree;

  std::vector<double> distribution(const std::vector<uint32_t>& samples) const {
    std::vector<double> dist(classes.size(), 0.0);
    for (uint32_t i : samples) {
      size_t k = std::lower_bound(classes.begin(), classes.end(), matrix.labels[i]) -
                 classes.begin();
      dist[k] += 1.0;
    }
    for (double& d : dist) d /= static_cast<double>(samples.size());
    return dist;
  }

  std::vector<uint32_t> sample_features() {
    // Floyd's sampling: `candidates_per_node` distinct ids, then sorted so tie
    // breaks are schedule-independent
    std::set<uint32_t> chosen;
    size_t n = matrix.n_features;
    for (size_t j = n - candidates_per_node; j < n; ++j) {
      uint32_t t = static_cast<uint32_t>(rng() % (j + 1));
      if (!chosen.insert(t).second) chosen.insert(static_cast<uint32_t>(j));
    }
    return {chosen.begin(), chosen.end()};
  }

  uint32_t build(std::vector<uint32_t>&& samples) {
    uint32_t id = static_cast<uint32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[id].count = static_cast<uint32_t>(samples.size());
    tree.nodes[id].dist = distribution(samples);

    double node_gini = gini(tree.nodes[id].dist);
    if (node_gini <= 0.0 || samples.size() < 2 * min_count) return id;

    double best_decrease = 0.0;
    int32_t best_feature = -1;
    for (uint32_t f : sample_features()) {
      std::vector<double> left_dist(classes.size(), 0.0), right_dist(classes.size(), 0.0);
      size_t nl = 0, nr = 0;
      for (uint32_t i : samples) {
        size_t k = std::lower_bound(classes.begin(), classes.end(), matrix.labels[i]) -
                   classes.begin();
        if (matrix.present(i, f)) {
          right_dist[k] += 1.0;
          ++nr;
        } else {
          left_dist[k] += 1.0;
          ++nl;
        }
      }
      if (nl < min_count || nr < min_count) continue;
      for (double& d : left_dist) d /= static_cast<double>(nl);
      for (double& d : right_dist) d /= static_cast<double>(nr);
      double decrease = node_gini -
                        (static_cast<double>(nl) / samples.size()) * gini(left_dist) -
                        (static_cast<double>(nr) / samples.size()) * gini(right_dist);
      if (decrease > best_decrease + 1e-15) {
        best_decrease = decrease;
        best_feature = static_cast<int32_t>(f);
      }
    }
    if (best_feature < 0) return id;

    std::vector<uint32_t> left_samples, right_samples;
    for (uint32_t i : samples)
      (matrix.present(i, static_cast<uint32_t>(best_feature)) ? right_samples : left_samples)
          .push_back(i);
    samples.clear();
    samples.shrink_to_fit();

    tree.nodes[id].feature = best_feature;
    uint32_t left = build(std::move(left_samples));
    tree.nodes[id].left = left;
    uint32_t right = build(std::move(right_samples));
    tree.nodes[id].right = right;
    return id;
  }
};

}  // namespace detail

// Each tree is grown on a bootstrap sample with Gini splits over a random
// sqrt(n_features) candidate subset; splits leaving a child below
// ceil(min_leaf_fraction * n_samples) are rejected. Per-tree seeds derive from
// the master seed, so results are schedule-independent.
inline Forest train_forest(const BinaryFeatureMatrix& matrix, size_t n_trees,
                           double min_leaf_fraction, uint64_t seed, size_t threads = 0) {
  if (n_trees < 1) throw std::invalid_argument("train_forest: n_trees must be >= 1");
  if (min_leaf_fraction <= 0 || min_leaf_fraction >= 1)
    throw std::invalid_argument("train_forest: min_leaf_fraction must be in (0,1)");
  if (matrix.n_samples() == 0) throw TrainingError("train_forest: empty matrix");

  std::vector<int> classes(matrix.labels);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

  Forest forest;
  forest.class_labels = classes;
  forest.n_features = matrix.n_features;
  forest.trees.resize(n_trees);
  forest.config.seed = seed;
  forest.config.n_trees = n_trees;
  forest.config.min_leaf_fraction = min_leaf_fraction;

  size_t min_count = std::max<size_t>(
      1, static_cast<size_t>(std::ceil(min_leaf_fraction * matrix.n_samples())));
  size_t candidates = std::max<size_t>(
      1, static_cast<size_t>(std::ceil(std::sqrt(static_cast<double>(matrix.n_features)))));
  candidates = std::min(candidates, matrix.n_features);

  parallel_for(n_trees, [&](size_t t) {
    detail::TreeBuilder builder{matrix, classes, min_count, candidates,
                                std::mt19937_64(mix64(seed) ^ mix64(t + 1)), {}};
    std::vector<uint32_t> bootstrap(matrix.n_samples());
    for (auto& i : bootstrap)
      i = static_cast<uint32_t>(builder.rng() % matrix.n_samples());
    builder.build(std::move(bootstrap));
    forest.trees[t] = std::move(builder.tree);
  }, threads);
  return forest;
}

// Ensemble probability is the unweighted mean of the leaf distributions.
inline Prediction predict(const Forest& model, const std::vector<uint32_t>& row) {
  for (uint32_t col : row)
    if (col >= model.n_features) throw std::invalid_argument("predict: feature id out of range");
  Prediction out;
  out.probabilities.assign(model.class_labels.size(), 0.0);
  for (const auto& tree : model.trees) {
    const auto& dist = tree.nodes[tree.leaf_for(row)].dist;
    for (size_t k = 0; k < dist.size(); ++k) out.probabilities[k] += dist[k];
  }
  for (double& p : out.probabilities) p /= static_cast<double>(model.trees.size());
  size_t best = 0;
  for (size_t k = 1; k < out.probabilities.size(); ++k)
    if (out.probabilities[k] > out.probabilities[best]) best = k;
  out.label = model.class_labels[best];
  return out;
}

}  // namespace gramsight
