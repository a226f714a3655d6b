#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "gramsight/byte_stream.hpp"
#include "gramsight/io_util.hpp"
#include "gramsight/ngram.hpp"
#include "gramsight/ngram_index.hpp"
#include "gramsight/parallel.hpp"

namespace gramsight {

// Ordered set of selected n-grams; the position in `ngrams` is the feature
// column id. Order is fixed at creation and immutable afterwards.
struct FeatureVocabulary {
  std::vector<NGram> ngrams;
  std::unordered_map<NGram, uint32_t, NGramHash> index;

  FeatureVocabulary() = default;
  explicit FeatureVocabulary(std::vector<NGram> ordered) : ngrams(std::move(ordered)) {
    index.reserve(ngrams.size());
    for (uint32_t i = 0; i < ngrams.size(); ++i) {
      if (!index.emplace(ngrams[i], i).second)
        throw std::invalid_argument("FeatureVocabulary: duplicate n-gram " + ngrams[i].hex());
    }
  }

  size_t size() const { return ngrams.size(); }
  size_t n() const { return ngrams.empty() ? 0 : ngrams.front().size(); }

  std::optional<uint32_t> column_of(const NGram& gram) const {
    auto it = index.find(gram);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
};

// Sparse presence matrix: each row holds the sorted column ids of the n-grams
// present in that sample.
struct BinaryFeatureMatrix {
  size_t n_features = 0;
  std::vector<std::string> sample_ids;
  std::vector<std::vector<uint32_t>> rows;
  std::vector<int> labels;

  size_t n_samples() const { return rows.size(); }

  bool present(size_t row, uint32_t col) const {
    const auto& r = rows[row];
    return std::binary_search(r.begin(), r.end(), col);
  }

  size_t row_index_of(const std::string& sample_id) const {
    for (size_t i = 0; i < sample_ids.size(); ++i)
      if (sample_ids[i] == sample_id) return i;
    throw std::invalid_argument("unknown sample id: " + sample_id);
  }
};

// Row contains column j iff vocab.ngrams[j] occurs in the stream.
inline std::vector<uint32_t> vectorize(const ByteStream& stream, const FeatureVocabulary& vocab) {
  if (vocab.ngrams.empty()) throw std::invalid_argument("vectorize: empty vocabulary");
  std::vector<uint32_t> row;
  for (const NGram& gram : extract_ngrams(stream, vocab.n()))
    if (auto col = vocab.column_of(gram)) row.push_back(*col);
  std::sort(row.begin(), row.end());
  return row;
}

// Line format: `HEXGRAM<TAB>column`, sorted by hex; column ids rebuild the
// score-descending creation order on reload.
inline std::string render_vocabulary(const FeatureVocabulary& vocab) {
  std::string out = "# gramsight-vocab v1 features=" + std::to_string(vocab.size()) + "\n";
  std::vector<std::pair<std::string, uint32_t>> lines;
  lines.reserve(vocab.size());
  for (uint32_t i = 0; i < vocab.ngrams.size(); ++i) lines.emplace_back(vocab.ngrams[i].hex(), i);
  std::sort(lines.begin(), lines.end());
  for (const auto& [hex, col] : lines) out += hex + "\t" + std::to_string(col) + "\n";
  return out;
}

inline FeatureVocabulary parse_vocabulary(std::string_view text) {
  std::vector<std::pair<uint32_t, NGram>> cols;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty() || line[0] == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string_view::npos) throw ParseError("vocabulary: missing tab");
    cols.emplace_back(static_cast<uint32_t>(std::stoul(std::string(line.substr(tab + 1)))),
                      NGram::from_hex(line.substr(0, tab)));
  }
  std::sort(cols.begin(), cols.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<NGram> ordered;
  ordered.reserve(cols.size());
  for (size_t i = 0; i < cols.size(); ++i) {
    if (cols[i].first != i) throw ParseError("vocabulary: column ids not contiguous");
    ordered.push_back(std::move(cols[i].second));
  }
  return FeatureVocabulary(std::move(ordered));
}

}  // namespace gramsight
