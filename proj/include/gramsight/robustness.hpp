#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "gramsight/interpret.hpp"
#include "gramsight/metrics.hpp"
#include "gramsight/model_io.hpp"
#include "gramsight/vocabulary.hpp"

namespace gramsight {

// Zeroes the named feature columns for every sample; returns the new matrix
// and the number of 1-entries removed. Idempotent.
inline std::pair<BinaryFeatureMatrix, size_t> ablate(const BinaryFeatureMatrix& matrix,
                                                     const std::set<uint32_t>& features) {
  for (uint32_t f : features)
    if (f >= matrix.n_features) throw std::invalid_argument("ablate: feature id out of range");
  BinaryFeatureMatrix out = matrix;
  size_t cells_changed = 0;
  for (auto& row : out.rows) {
    size_t before = row.size();
    row.erase(std::remove_if(row.begin(), row.end(),
                             [&](uint32_t col) { return features.count(col) != 0; }),
              row.end());
    cells_changed += before - row.size();
  }
  return {std::move(out), cells_changed};
}

struct AblationReport {
  std::vector<NGram> ablated_features;
  size_t cells_changed = 0;
  size_t baseline_errors = 0;
  size_t ablated_errors = 0;
  std::map<int, long> per_class_error_delta;  // keyed by true label
  double accuracy_before = 0;
  double accuracy_after = 0;
  double balanced_accuracy_before = 0;
  double balanced_accuracy_after = 0;
};

// Reclassifies the corpus with the named columns zeroed and reports the
// misclassification deltas, overall and per true class.
inline AblationReport ablation_report(const ModelArtifact& model,
                                      const BinaryFeatureMatrix& matrix,
                                      const FeatureVocabulary& vocab,
                                      const std::set<uint32_t>& features) {
  auto [ablated, cells_changed] = ablate(matrix, features);

  AblationReport report;
  for (uint32_t f : features) report.ablated_features.push_back(vocab.ngrams[f]);
  report.cells_changed = cells_changed;

  std::vector<int> before, after;
  before.reserve(matrix.n_samples());
  for (size_t i = 0; i < matrix.n_samples(); ++i) {
    before.push_back(predict(model, matrix.rows[i]).label);
    after.push_back(predict(model, ablated.rows[i]).label);
  }

  std::map<int, long> errors_before, errors_after;
  for (size_t i = 0; i < matrix.n_samples(); ++i) {
    errors_before[matrix.labels[i]] += 0;  // make every class appear in the report
    errors_after[matrix.labels[i]] += 0;
    if (before[i] != matrix.labels[i]) {
      ++errors_before[matrix.labels[i]];
      ++report.baseline_errors;
    }
    if (after[i] != matrix.labels[i]) {
      ++errors_after[matrix.labels[i]];
      ++report.ablated_errors;
    }
  }
  for (const auto& [label, count] : errors_after)
    report.per_class_error_delta[label] = count - errors_before[label];

  report.accuracy_before = accuracy(before, matrix.labels);
  report.accuracy_after = accuracy(after, matrix.labels);
  report.balanced_accuracy_before = detail::balanced_accuracy_lenient(before, matrix.labels);
  report.balanced_accuracy_after = detail::balanced_accuracy_lenient(after, matrix.labels);
  return report;
}

// Picks feature ids from a ranking: either the top k entries or every entry
// with value >= min_value. Exactly one selector must be given.
inline std::set<uint32_t> significant_features(const RankedFeatures& ranked,
                                               const FeatureVocabulary& vocab,
                                               std::optional<size_t> k,
                                               std::optional<double> min_value) {
  if (k.has_value() == min_value.has_value())
    throw std::invalid_argument("significant_features: give exactly one of k / min_value");
  auto column = [&](const NGram& gram) {
    auto col = vocab.column_of(gram);
    if (!col)
      throw std::invalid_argument("significant_features: n-gram " + gram.hex() +
                                  " not in vocabulary");
    return *col;
  };
  std::set<uint32_t> out;
  if (k) {
    for (const auto& entry : ranked.top(*k)) out.insert(column(entry.ngram));
  } else {
    for (const auto& entry : ranked.entries)
      if (entry.value >= *min_value) out.insert(column(entry.ngram));
  }
  return out;
}

}  // namespace gramsight
