#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "gramsight/interpret.hpp"
#include "gramsight/mlp.hpp"
#include "gramsight/parallel.hpp"
#include "gramsight/vocabulary.hpp"

namespace gramsight {

// Epsilon-rule relevance propagation. The explained quantity is the
// pre-sigmoid score of the target node; tanh is relevance-transparent, so a
// unit's relevance redistributes over its weighted inputs against the linear
// pre-activation.
inline constexpr double kLrpEpsilon = 1e-9;

namespace detail {

inline double lrp_stabilized(double z) { return z + (z >= 0 ? kLrpEpsilon : -kLrpEpsilon); }

}  // namespace detail

struct RelevanceVector {
  enum class Target { output_class, hidden_node };
  Target target_kind = Target::output_class;
  int target_id = 0;               // class label, or 1-based hidden node id
  std::vector<double> relevances;  // per input node of the explained (sub)network
  double total = 0;                // relevance placed on the target

  double relevance_sum() const {
    double s = 0;
    for (double r : relevances) s += r;
    return s;
  }
};

// Relevances of the input features for one output class:
//   R_i = sum_j x_i w1_ij / (z1_j + eps sgn z1_j) * R_j
//   R_j = a1_j w2_jt / (z2_t + eps sgn z2_t) * R_t,   R_t = z2_t
inline RelevanceVector lrp_relevances(const Mlp& model, const std::vector<uint32_t>& row,
                                      int target_class) {
  size_t t = [&] {
    auto it = std::lower_bound(model.class_labels.begin(), model.class_labels.end(), target_class);
    if (it == model.class_labels.end() || *it != target_class)
      throw std::invalid_argument("lrp_relevances: unknown class " + std::to_string(target_class));
    return static_cast<size_t>(it - model.class_labels.begin());
  }();
  auto act = mlp_forward(model, row);

  RelevanceVector out;
  out.target_kind = RelevanceVector::Target::output_class;
  out.target_id = target_class;
  out.total = act.output_pre[t];
  out.relevances.assign(model.n_features, 0.0);
  if (out.total == 0.0) return out;

  double z2 = act.output_pre[t];
  std::vector<double> hidden_rel(model.hidden);
  for (size_t h = 0; h < model.hidden; ++h)
    hidden_rel[h] = act.hidden_post[h] * model.w2_at(h, t) / detail::lrp_stabilized(z2) * out.total;

  for (size_t h = 0; h < model.hidden; ++h) {
    if (hidden_rel[h] == 0.0 || act.hidden_pre[h] == 0.0) continue;
    double scale = hidden_rel[h] / detail::lrp_stabilized(act.hidden_pre[h]);
    for (uint32_t col : row) out.relevances[col] += model.w1_at(col, h) * scale;
  }
  return out;
}

// Hidden-layer relevances via a duplicate of the last two layers: a
// sub-network with the hidden layer as its input layer (weights W2), fed the
// original pre-activation vector x.W1. Its input relevances are the hidden
// node relevances of the full network.
inline RelevanceVector hidden_relevances(const Mlp& model, const std::vector<uint32_t>& row,
                                         std::optional<int> target_class = std::nullopt) {
  int cls = target_class ? *target_class : predict(model, row).label;
  size_t t = [&] {
    auto it = std::lower_bound(model.class_labels.begin(), model.class_labels.end(), cls);
    if (it == model.class_labels.end() || *it != cls)
      throw std::invalid_argument("hidden_relevances: unknown class " + std::to_string(cls));
    return static_cast<size_t>(it - model.class_labels.begin());
  }();

  auto original = mlp_forward(model, row);
  const std::vector<double>& sub_input = original.hidden_pre;  // x . W1

  // forward pass of the duplicate: tanh input activation, then W2
  std::vector<double> sub_act(model.hidden);
  for (size_t h = 0; h < model.hidden; ++h) sub_act[h] = std::tanh(sub_input[h]);
  double z2 = 0;
  for (size_t h = 0; h < model.hidden; ++h) z2 += sub_act[h] * model.w2_at(h, t);

  RelevanceVector out;
  out.target_kind = RelevanceVector::Target::output_class;
  out.target_id = cls;
  out.total = z2;
  out.relevances.assign(model.hidden, 0.0);
  if (z2 == 0.0) return out;
  for (size_t h = 0; h < model.hidden; ++h)
    out.relevances[h] = sub_act[h] * model.w2_at(h, t) / detail::lrp_stabilized(z2) * z2;
  return out;
}

// Input relevances toward a single hidden node (1-based id) via the
// one-output sub-network carrying that node's weight column; the target
// relevance is the node's pre-activation.
inline RelevanceVector input_relevances_for_hidden_node(const Mlp& model,
                                                        const std::vector<uint32_t>& row,
                                                        size_t node_id) {
  if (node_id < 1 || node_id > model.hidden)
    throw std::invalid_argument("input_relevances_for_hidden_node: node id out of range");
  size_t h = node_id - 1;
  auto act = mlp_forward(model, row);
  double z = act.hidden_pre[h];

  RelevanceVector out;
  out.target_kind = RelevanceVector::Target::hidden_node;
  out.target_id = static_cast<int>(node_id);
  out.total = z;
  out.relevances.assign(model.n_features, 0.0);
  if (z == 0.0) return out;
  for (uint32_t col : row)
    out.relevances[col] = model.w1_at(col, h) / detail::lrp_stabilized(z) * z;
  return out;
}

// Mean absolute relevance per input node, each sample explained toward its
// own predicted class.
inline RankedFeatures avg_abs_relevances(const Mlp& model, const BinaryFeatureMatrix& matrix,
                                         const FeatureVocabulary& vocab, size_t threads = 0) {
  if (vocab.size() != model.n_features)
    throw std::invalid_argument("avg_abs_relevances: vocabulary/model width mismatch");
  // fixed-size chunks reduced in chunk order, so the float accumulation does
  // not depend on the thread count
  const size_t chunk = 64;
  size_t n_chunks = (matrix.n_samples() + chunk - 1) / chunk;
  std::vector<std::vector<double>> partial(n_chunks);
  parallel_for(n_chunks, [&](size_t c) {
    auto& acc = partial[c];
    acc.assign(model.n_features, 0.0);
    size_t end = std::min((c + 1) * chunk, matrix.n_samples());
    for (size_t i = c * chunk; i < end; ++i) {
      auto rel = lrp_relevances(model, matrix.rows[i], predict(model, matrix.rows[i]).label);
      for (uint32_t col : matrix.rows[i]) acc[col] += std::abs(rel.relevances[col]);
    }
  }, threads);

  std::vector<double> values(model.n_features, 0.0);
  for (const auto& p : partial)
    for (size_t f = 0; f < values.size(); ++f) values[f] += p[f];
  if (matrix.n_samples() > 0)
    for (double& v : values) v /= static_cast<double>(matrix.n_samples());
  return detail::rank_values(values, vocab, RankingKind::avg_abs_relevance, std::nullopt);
}

// Signed relevances toward `class_label`, averaged over the samples correctly
// classified as that class; nullopt when there are none.
inline std::optional<RankedFeatures> class_avg_relevances(const Mlp& model,
                                                          const BinaryFeatureMatrix& matrix,
                                                          const FeatureVocabulary& vocab,
                                                          int class_label) {
  if (vocab.size() != model.n_features)
    throw std::invalid_argument("class_avg_relevances: vocabulary/model width mismatch");
  if (!std::binary_search(model.class_labels.begin(), model.class_labels.end(), class_label))
    throw std::invalid_argument("class_avg_relevances: unknown class " +
                                std::to_string(class_label));
  std::vector<double> values(model.n_features, 0.0);
  size_t count = 0;
  for (size_t i = 0; i < matrix.n_samples(); ++i) {
    if (matrix.labels[i] != class_label) continue;
    if (predict(model, matrix.rows[i]).label != class_label) continue;
    auto rel = lrp_relevances(model, matrix.rows[i], class_label);
    for (uint32_t col : matrix.rows[i]) values[col] += rel.relevances[col];
    ++count;
  }
  if (count == 0) return std::nullopt;
  for (double& v : values) v /= static_cast<double>(count);
  return detail::rank_values(values, vocab, RankingKind::class_avg_relevance, class_label);
}

}  // namespace gramsight
