#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

namespace gramsight {

// Unweighted mean of per-class recall over the classes present in `labels`.
// Predicting a class that never occurs as a label is an argument error.
inline double balanced_accuracy(const std::vector<int>& predictions, const std::vector<int>& labels) {
  if (predictions.size() != labels.size())
    throw std::invalid_argument("balanced_accuracy: length mismatch");
  if (labels.empty()) throw std::invalid_argument("balanced_accuracy: empty input");
  std::map<int, std::pair<size_t, size_t>> per_class;  // label -> (correct, total)
  for (size_t i = 0; i < labels.size(); ++i) {
    auto& [correct, total] = per_class[labels[i]];
    ++total;
    if (predictions[i] == labels[i]) ++correct;
  }
  for (int p : predictions)
    if (!per_class.count(p))
      throw std::invalid_argument("balanced_accuracy: predicted class " + std::to_string(p) +
                                  " absent from labels");
  double sum = 0;
  for (const auto& [label, ct] : per_class) sum += static_cast<double>(ct.first) / ct.second;
  return sum / per_class.size();
}

inline double accuracy(const std::vector<int>& predictions, const std::vector<int>& labels) {
  if (predictions.size() != labels.size()) throw std::invalid_argument("accuracy: length mismatch");
  if (labels.empty()) return 0.0;
  size_t correct = 0;
  for (size_t i = 0; i < labels.size(); ++i)
    if (predictions[i] == labels[i]) ++correct;
  return static_cast<double>(correct) / labels.size();
}

namespace detail {

// Cross-validation variant: a prediction outside the fold's label set is just
// a miss instead of an error (small folds can drop rare classes).
inline double balanced_accuracy_lenient(const std::vector<int>& predictions,
                                        const std::vector<int>& labels) {
  std::map<int, std::pair<size_t, size_t>> per_class;
  for (size_t i = 0; i < labels.size(); ++i) {
    auto& [correct, total] = per_class[labels[i]];
    ++total;
    if (predictions[i] == labels[i]) ++correct;
  }
  if (per_class.empty()) return 0.0;
  double sum = 0;
  for (const auto& [label, ct] : per_class) sum += static_cast<double>(ct.first) / ct.second;
  return sum / per_class.size();
}

}  // namespace detail

}  // namespace gramsight
