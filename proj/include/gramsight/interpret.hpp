#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gramsight/forest.hpp"
#include "gramsight/logreg.hpp"
#include "gramsight/vocabulary.hpp"

namespace gramsight {

enum class RankingKind {
  avg_abs_weight,
  class_weight,
  gini_importance,
  avg_abs_relevance,
  class_avg_relevance,
};

inline std::string to_string(RankingKind kind) {
  switch (kind) {
    case RankingKind::avg_abs_weight: return "avg_abs_weight";
    case RankingKind::class_weight: return "class_weight";
    case RankingKind::gini_importance: return "gini_importance";
    case RankingKind::avg_abs_relevance: return "avg_abs_relevance";
    case RankingKind::class_avg_relevance: return "class_avg_relevance";
  }
  return "?";
}

struct RankedEntry {
  NGram ngram;
  double value = 0;
};

// Full descending ranking (ties by hex); reports truncate to top-k.
struct RankedFeatures {
  RankingKind kind = RankingKind::avg_abs_weight;
  std::optional<int> class_label;
  std::vector<RankedEntry> entries;

  std::vector<RankedEntry> top(size_t k) const {
    std::vector<RankedEntry> out(entries.begin(),
                                 entries.begin() + std::min(k, entries.size()));
    return out;
  }
};

namespace detail {

inline RankedFeatures rank_values(const std::vector<double>& values,
                                  const FeatureVocabulary& vocab, RankingKind kind,
                                  std::optional<int> class_label) {
  RankedFeatures out;
  out.kind = kind;
  out.class_label = class_label;
  out.entries.reserve(values.size());
  for (size_t f = 0; f < values.size(); ++f) out.entries.push_back({vocab.ngrams[f], values[f]});
  std::sort(out.entries.begin(), out.entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.ngram < b.ngram;
  });
  return out;
}

}  // namespace detail

// Mean of |weight| across the per-class sub-models; sign is dropped so
// opposite-signed weights cannot cancel.
inline RankedFeatures avg_abs_weights(const LogRegOVR& model, const FeatureVocabulary& vocab) {
  if (vocab.size() != model.n_features)
    throw std::invalid_argument("avg_abs_weights: vocabulary/model width mismatch");
  std::vector<double> values(model.n_features, 0.0);
  for (const auto& beta : model.weights)
    for (size_t f = 0; f < beta.size(); ++f) values[f] += std::abs(beta[f]);
  for (double& v : values) v /= static_cast<double>(model.weights.size());
  return detail::rank_values(values, vocab, RankingKind::avg_abs_weight, std::nullopt);
}

// Raw signed weights of one class's sub-model.
inline RankedFeatures class_weights(const LogRegOVR& model, int class_label,
                                    const FeatureVocabulary& vocab) {
  if (vocab.size() != model.n_features)
    throw std::invalid_argument("class_weights: vocabulary/model width mismatch");
  size_t c = model.class_index(class_label);
  return detail::rank_values(model.weights[c], vocab, RankingKind::class_weight, class_label);
}

struct OddsTerm {
  NGram ngram;
  double weight = 0;
  double percent_odds_change = 0;  // (e^w - 1) * 100
};

struct OddsWalkthrough {
  std::vector<uint32_t> present_features;
  double start_odds = 0;      // reference odds
  double chained_odds = 0;    // start_odds * prod(1 + pct/100)
  double predicted_odds = 0;  // exp(decision score); equals chained_odds
  double predicted_probability = 0;
};

// Odds-ratio reading of one binary sub-model: a present feature multiplies the
// predicted odds by e^w, i.e. changes them by (e^w - 1)*100 percent. The
// reference sample is the zero vector, whose probability is sigmoid of the
// intercept alone.
struct OddsExplanation {
  int class_label = 0;
  double intercept = 0;
  double reference_probability = 0;
  double reference_odds = 0;
  std::vector<OddsTerm> terms;  // ordered by descending weight
  std::optional<OddsWalkthrough> walkthrough;
};

inline OddsExplanation odds_explanation(const LogRegOVR& model, int class_label,
                                        const FeatureVocabulary& vocab,
                                        const std::vector<uint32_t>* sample = nullptr) {
  size_t c = model.class_index(class_label);
  OddsExplanation out;
  out.class_label = class_label;
  out.intercept = model.intercepts[c];
  out.reference_probability = sigmoid(out.intercept);
  out.reference_odds = std::exp(out.intercept);

  auto ranked = class_weights(model, class_label, vocab);
  out.terms.reserve(ranked.entries.size());
  for (const auto& entry : ranked.entries)
    out.terms.push_back({entry.ngram, entry.value, (std::exp(entry.value) - 1.0) * 100.0});

  if (sample) {
    OddsWalkthrough walk;
    walk.present_features = *sample;
    walk.start_odds = out.reference_odds;
    double odds = out.reference_odds;
    for (uint32_t col : *sample) {
      double pct = (std::exp(model.weights[c][col]) - 1.0) * 100.0;
      odds *= 1.0 + pct / 100.0;
    }
    walk.chained_odds = odds;
    walk.predicted_odds = model.predicted_odds(c, *sample);
    walk.predicted_probability = sigmoid(model.decision_score(c, *sample));
    out.walkthrough = walk;
  }
  return out;
}

// Mean decrease in Gini impurity per feature. Per-tree importances are
// normalized to sum 1 before averaging, matching the convention of the usual
// forest implementations; the averaged vector is normalized again so trees
// without splits do not deflate it.
inline RankedFeatures gini_importances(const Forest& model, const FeatureVocabulary& vocab) {
  if (vocab.size() != model.n_features)
    throw std::invalid_argument("gini_importances: vocabulary/model width mismatch");
  std::vector<double> total(model.n_features, 0.0);
  std::vector<double> per_tree(model.n_features);
  for (const auto& tree : model.trees) {
    std::fill(per_tree.begin(), per_tree.end(), 0.0);
    double root_count = tree.nodes.empty() ? 0.0 : static_cast<double>(tree.nodes[0].count);
    for (const auto& node : tree.nodes) {
      if (node.feature < 0) continue;
      const auto& left = tree.nodes[node.left];
      const auto& right = tree.nodes[node.right];
      double decrease = (node.count * detail::gini(node.dist) -
                         left.count * detail::gini(left.dist) -
                         right.count * detail::gini(right.dist)) /
                        root_count;
      per_tree[static_cast<size_t>(node.feature)] += decrease;
    }
    double sum = 0;
    for (double v : per_tree) sum += v;
    if (sum > 0)
      for (size_t f = 0; f < per_tree.size(); ++f) total[f] += per_tree[f] / sum;
  }
  double sum = 0;
  for (double v : total) sum += v;
  if (sum > 0)
    for (double& v : total) v /= sum;
  return detail::rank_values(total, vocab, RankingKind::gini_importance, std::nullopt);
}

// Tree whose leaf assigns `class_label` the highest probability for this row;
// ties go to the lowest tree id.
inline size_t best_tree_for_sample(const Forest& model, const std::vector<uint32_t>& row,
                                   int class_label) {
  size_t c = [&] {
    auto it = std::lower_bound(model.class_labels.begin(), model.class_labels.end(), class_label);
    if (it == model.class_labels.end() || *it != class_label)
      throw std::invalid_argument("best_tree_for_sample: unknown class " +
                                  std::to_string(class_label));
    return static_cast<size_t>(it - model.class_labels.begin());
  }();
  size_t best = 0;
  double best_prob = -1.0;
  for (size_t t = 0; t < model.trees.size(); ++t) {
    double p = model.trees[t].nodes[model.trees[t].leaf_for(row)].dist[c];
    if (p > best_prob) {
      best_prob = p;
      best = t;
    }
  }
  return best;
}

// Decision-path decomposition: the root distribution is the bias, every edge
// adds (child - parent) to its split feature, and bias + sum of contributions
// reproduces the leaf distribution exactly.
struct ContributionBreakdown {
  std::vector<double> bias;
  std::vector<std::pair<uint32_t, std::vector<double>>> contributions;  // path order
  std::vector<double> prediction;
};

inline ContributionBreakdown tree_contributions(const DecisionTree& tree,
                                                const std::vector<uint32_t>& row) {
  ContributionBreakdown out;
  out.bias = tree.nodes[0].dist;
  uint32_t id = 0;
  while (!tree.is_leaf(id)) {
    const auto& node = tree.nodes[id];
    uint32_t feature = static_cast<uint32_t>(node.feature);
    bool present = std::binary_search(row.begin(), row.end(), feature);
    uint32_t child = present ? node.right : node.left;
    auto it = std::find_if(out.contributions.begin(), out.contributions.end(),
                           [&](const auto& c) { return c.first == feature; });
    if (it == out.contributions.end()) {
      out.contributions.push_back({feature, std::vector<double>(out.bias.size(), 0.0)});
      it = std::prev(out.contributions.end());
    }
    for (size_t k = 0; k < out.bias.size(); ++k)
      it->second[k] += tree.nodes[child].dist[k] - node.dist[k];
    id = child;
  }
  out.prediction = tree.nodes[id].dist;
  return out;
}

}  // namespace gramsight
