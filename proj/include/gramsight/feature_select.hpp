#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "gramsight/io_util.hpp"
#include "gramsight/ngram.hpp"
#include "gramsight/parallel.hpp"
#include "gramsight/vocabulary.hpp"

namespace gramsight {

enum class Scorer { chi2, mutual_information };

inline std::string to_string(Scorer s) {
  return s == Scorer::chi2 ? "chi2" : "mi";
}

inline Scorer scorer_from_string(const std::string& s) {
  if (s == "chi2") return Scorer::chi2;
  if (s == "mi" || s == "mutual_information") return Scorer::mutual_information;
  throw std::invalid_argument("unknown scorer: " + s);
}

struct ScoreTable {
  std::map<NGram, double> scores;
  Scorer scorer = Scorer::chi2;
  size_t batch_count = 1;
};

namespace detail {

// Pearson chi-square of the 2xK presence/class table. Cells with expected
// count 0 contribute 0.
inline double chi2_from_counts(const std::vector<uint64_t>& present,
                               const std::vector<uint64_t>& class_totals, uint64_t total) {
  uint64_t present_total = 0;
  for (uint64_t c : present) present_total += c;
  uint64_t absent_total = total - present_total;
  double stat = 0.0;
  for (size_t k = 0; k < class_totals.size(); ++k) {
    double e1 = static_cast<double>(present_total) * class_totals[k] / total;
    double e0 = static_cast<double>(absent_total) * class_totals[k] / total;
    double o1 = static_cast<double>(present[k]);
    double o0 = static_cast<double>(class_totals[k] - present[k]);
    if (e1 > 0) stat += (o1 - e1) * (o1 - e1) / e1;
    if (e0 > 0) stat += (o0 - e0) * (o0 - e0) / e0;
  }
  return stat;
}

// Plug-in mutual information in nats; terms with zero joint mass contribute 0.
inline double mi_from_counts(const std::vector<uint64_t>& present,
                             const std::vector<uint64_t>& class_totals, uint64_t total) {
  uint64_t present_total = 0;
  for (uint64_t c : present) present_total += c;
  uint64_t absent_total = total - present_total;
  double n = static_cast<double>(total);
  double mi = 0.0;
  for (size_t k = 0; k < class_totals.size(); ++k) {
    double py = class_totals[k] / n;
    if (py == 0) continue;
    uint64_t joint[2] = {class_totals[k] - present[k], present[k]};
    double px[2] = {absent_total / n, present_total / n};
    for (int x = 0; x < 2; ++x) {
      if (joint[x] == 0) continue;
      double pxy = joint[x] / n;
      mi += pxy * std::log(pxy / (px[x] * py));
    }
  }
  return mi;
}

inline std::vector<int> distinct_labels(const std::vector<int>& labels) {
  std::vector<int> classes(labels);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  return classes;
}

}  // namespace detail

inline double chi2_score(const std::vector<uint8_t>& column, const std::vector<int>& labels) {
  if (column.size() != labels.size())
    throw std::invalid_argument("chi2_score: column/labels length mismatch");
  if (labels.empty()) throw std::invalid_argument("chi2_score: empty input");
  auto classes = detail::distinct_labels(labels);
  std::vector<uint64_t> present(classes.size(), 0), totals(classes.size(), 0);
  for (size_t i = 0; i < labels.size(); ++i) {
    size_t k = std::lower_bound(classes.begin(), classes.end(), labels[i]) - classes.begin();
    ++totals[k];
    if (column[i]) ++present[k];
  }
  return detail::chi2_from_counts(present, totals, labels.size());
}

inline double mi_score(const std::vector<uint8_t>& column, const std::vector<int>& labels) {
  if (column.size() != labels.size())
    throw std::invalid_argument("mi_score: column/labels length mismatch");
  if (labels.empty()) throw std::invalid_argument("mi_score: empty input");
  auto classes = detail::distinct_labels(labels);
  std::vector<uint64_t> present(classes.size(), 0), totals(classes.size(), 0);
  for (size_t i = 0; i < labels.size(); ++i) {
    size_t k = std::lower_bound(classes.begin(), classes.end(), labels[i]) - classes.begin();
    ++totals[k];
    if (column[i]) ++present[k];
  }
  return detail::mi_from_counts(present, totals, labels.size());
}

// Per-feature score = arithmetic mean of the per-batch scores. Batches come
// from stratified_partition so every batch carries the full class mix.
inline ScoreTable batched_scores(const BinaryFeatureMatrix& matrix, const FeatureVocabulary& vocab,
                                 Scorer scorer, const std::vector<std::vector<std::string>>& batches,
                                 size_t threads = 0) {
  if (vocab.size() != matrix.n_features)
    throw std::invalid_argument("batched_scores: vocabulary/matrix width mismatch");
  if (batches.empty()) throw std::invalid_argument("batched_scores: no batches");

  std::map<std::string, size_t> row_of;
  for (size_t i = 0; i < matrix.sample_ids.size(); ++i) row_of[matrix.sample_ids[i]] = i;

  std::vector<double> sums(matrix.n_features, 0.0);
  for (const auto& batch : batches) {
    if (batch.empty()) throw std::invalid_argument("batched_scores: empty batch");
    std::vector<size_t> rows;
    rows.reserve(batch.size());
    for (const auto& id : batch) {
      auto it = row_of.find(id);
      if (it == row_of.end()) throw std::invalid_argument("batched_scores: unknown sample " + id);
      rows.push_back(it->second);
    }

    std::vector<int> batch_labels;
    batch_labels.reserve(rows.size());
    for (size_t r : rows) batch_labels.push_back(matrix.labels[r]);
    auto classes = detail::distinct_labels(batch_labels);
    std::vector<uint64_t> totals(classes.size(), 0);

    // present[f * K + k] = samples of class k in this batch containing f
    const size_t K = classes.size();
    std::vector<uint64_t> present(matrix.n_features * K, 0);
    for (size_t r : rows) {
      size_t k = std::lower_bound(classes.begin(), classes.end(), matrix.labels[r]) - classes.begin();
      ++totals[k];
      for (uint32_t col : matrix.rows[r]) ++present[static_cast<size_t>(col) * K + k];
    }

    parallel_for(matrix.n_features, [&](size_t f) {
      std::vector<uint64_t> p(present.begin() + f * K, present.begin() + (f + 1) * K);
      double s = scorer == Scorer::chi2 ? detail::chi2_from_counts(p, totals, rows.size())
                                        : detail::mi_from_counts(p, totals, rows.size());
      sums[f] += s;
    }, threads);
  }

  ScoreTable table;
  table.scorer = scorer;
  table.batch_count = batches.size();
  for (size_t f = 0; f < matrix.n_features; ++f)
    table.scores[vocab.ngrams[f]] = sums[f] / static_cast<double>(batches.size());
  return table;
}

// Features scoring strictly above the threshold, ordered by descending score
// with ties broken by hex string.
inline FeatureVocabulary select_by_threshold(const ScoreTable& scores, double threshold) {
  if (!std::isfinite(threshold)) throw std::invalid_argument("select_by_threshold: non-finite threshold");
  std::vector<std::pair<double, NGram>> selected;
  for (const auto& [gram, score] : scores.scores)
    if (score > threshold) selected.emplace_back(score, gram);
  std::sort(selected.begin(), selected.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<NGram> ordered;
  ordered.reserve(selected.size());
  for (auto& [score, gram] : selected) ordered.push_back(std::move(gram));
  return FeatureVocabulary(std::move(ordered));
}

inline std::string render_score_table(const ScoreTable& table) {
  std::string out = "# gramsight-scores v1 scorer=" + to_string(table.scorer) +
                    " batches=" + std::to_string(table.batch_count) + "\n";
  for (const auto& [gram, score] : table.scores) out += gram.hex() + "\t" + fmt_g17(score) + "\n";
  return out;
}

inline ScoreTable parse_score_table(std::string_view text) {
  ScoreTable table;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty()) continue;
    if (line[0] == '#') {
      size_t sp = line.find("scorer=");
      size_t bp = line.find("batches=");
      if (sp == std::string_view::npos || bp == std::string_view::npos)
        throw ParseError("score table: malformed header");
      std::string scorer(line.substr(sp + 7, line.find(' ', sp + 7) - (sp + 7)));
      table.scorer = scorer_from_string(scorer);
      table.batch_count = std::stoul(std::string(line.substr(bp + 8)));
      continue;
    }
    size_t tab = line.find('\t');
    if (tab == std::string_view::npos) throw ParseError("score table: missing tab");
    table.scores[NGram::from_hex(line.substr(0, tab))] =
        parse_double(std::string(line.substr(tab + 1)));
  }
  return table;
}

}  // namespace gramsight
