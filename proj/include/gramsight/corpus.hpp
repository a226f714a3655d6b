#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gramsight/hex.hpp"
#include "gramsight/ngram.hpp"

namespace gramsight {

// Class names of the Microsoft Malware Classification Challenge corpus,
// indexed by label 1..9. Synthetic corpora reuse the same labels.
inline const std::map<int, std::string>& default_family_names() {
  static const std::map<int, std::string> names = {
      {1, "Ramnit"},        {2, "Lollipop"}, {3, "Kelihos_ver3"},
      {4, "Vundo"},         {5, "Simda"},    {6, "Tracur"},
      {7, "Kelihos_ver1"},  {8, "Obfuscator.ACY"}, {9, "Gatak"},
  };
  return names;
}

struct LabeledCorpus {
  std::vector<std::pair<std::string, int>> samples;  // (sample_id, class label)
  std::map<int, std::string> class_names;

  size_t size() const { return samples.size(); }

  std::vector<int> class_labels() const {
    std::set<int> s;
    for (const auto& [id, label] : samples) s.insert(label);
    return {s.begin(), s.end()};
  }

  std::string class_name(int label) const {
    auto it = class_names.find(label);
    return it != class_names.end() ? it->second : "class_" + std::to_string(label);
  }
};

// Manifest format: CSV with header `Id,Class`, one row per sample.
inline LabeledCorpus parse_manifest(std::string_view text) {
  LabeledCorpus corpus;
  size_t pos = 0;
  size_t line_no = 0;
  std::set<std::string> seen;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    bool last = eol == std::string_view::npos;
    std::string_view line = detail::trim(text.substr(pos, last ? text.size() - pos : eol - pos));
    pos = last ? text.size() + 1 : eol + 1;
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "Id,Class")
        throw ParseError("manifest: expected header 'Id,Class', got '" + std::string(line) + "'");
      continue;
    }
    size_t comma = line.find(',');
    if (comma == std::string_view::npos || comma == 0)
      throw ParseError("manifest line " + std::to_string(line_no) + ": expected 'id,label'");
    std::string id(detail::trim(line.substr(0, comma)));
    std::string_view label_str = detail::trim(line.substr(comma + 1));
    int label = 0;
    try {
      label = std::stoi(std::string(label_str));
    } catch (const std::exception&) {
      throw ParseError("manifest line " + std::to_string(line_no) + ": bad class label '" +
                       std::string(label_str) + "'");
    }
    if (!seen.insert(id).second)
      throw ParseError("manifest line " + std::to_string(line_no) + ": duplicate sample id '" + id + "'");
    corpus.samples.emplace_back(std::move(id), label);
  }
  auto labels = corpus.class_labels();
  const auto& defaults = default_family_names();
  for (int label : labels) {
    auto it = defaults.find(label);
    corpus.class_names[label] = it != defaults.end() ? it->second : "class_" + std::to_string(label);
  }
  return corpus;
}

inline std::string render_manifest(const LabeledCorpus& corpus) {
  std::string out = "Id,Class\n";
  for (const auto& [id, label] : corpus.samples) out += id + "," + std::to_string(label) + "\n";
  return out;
}

// Splits the corpus into k parts with the same class distribution: per-class
// counts across parts differ by at most one. Ids are shuffled per class with a
// seed-derived generator and dealt round-robin; the dealing offset rotates
// between classes so remainders spread evenly over parts.
inline std::vector<std::vector<std::string>> stratified_partition(const LabeledCorpus& corpus,
                                                                  size_t k, uint64_t seed) {
  if (k < 2) throw std::invalid_argument("stratified_partition: k must be >= 2");

  std::map<int, std::vector<std::string>> by_class;
  for (const auto& [id, label] : corpus.samples) by_class[label].push_back(id);

  std::vector<std::vector<std::string>> parts(k);
  size_t offset = 0;
  for (auto& [label, ids] : by_class) {
    std::sort(ids.begin(), ids.end());  // input-order independence
    std::mt19937_64 rng(mix64(seed) ^ mix64(static_cast<uint64_t>(label) + 0x517CC1B7ull));
    std::shuffle(ids.begin(), ids.end(), rng);
    for (size_t j = 0; j < ids.size(); ++j) parts[(offset + j) % k].push_back(ids[j]);
    offset = (offset + ids.size()) % k;
  }
  for (auto& part : parts) std::sort(part.begin(), part.end());
  return parts;
}

}  // namespace gramsight
