#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "gramsight/byte_stream.hpp"
#include "gramsight/io_util.hpp"
#include "gramsight/ngram.hpp"
#include "gramsight/parallel.hpp"

namespace gramsight {

struct CountingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Document-frequency counts for every n-gram seen in a corpus. A sample
// contributes at most one to any count, no matter how often the n-gram occurs
// in it.
struct DocFreqTable {
  std::map<NGram, uint32_t> entries;
  uint64_t corpus_size = 0;
  size_t n = 0;
};

// All length-n windows fully contained in single runs; windows never span the
// gaps left by unreadable bytes or address jumps.
inline std::set<NGram> extract_ngrams(const ByteStream& stream, size_t n) {
  if (n < 1) throw std::invalid_argument("extract_ngrams: n must be >= 1");
  std::set<NGram> out;
  for (const auto& run : stream.runs) {
    if (run.bytes.size() < n) continue;
    for (size_t i = 0; i + n <= run.bytes.size(); ++i)
      out.insert(NGram(run.bytes.substr(i, n)));
  }
  return out;
}

namespace detail {

inline uint64_t pack_mask(size_t n) { return n >= 8 ? ~0ull : ((1ull << (8 * n)) - 1); }

inline uint64_t pack_ngram(std::string_view bytes) {
  uint64_t w = 0;
  for (unsigned char c : bytes) w = (w << 8) | c;
  return w;
}

inline NGram unpack_ngram(uint64_t key, size_t n) {
  std::string b(n, '\0');
  for (size_t i = 0; i < n; ++i)
    b[i] = static_cast<char>((key >> (8 * (n - 1 - i))) & 0xFF);
  return NGram(std::move(b));
}

template <typename Fn>
inline void for_each_window(const ByteRun& run, size_t n, Fn&& fn) {
  const auto* p = reinterpret_cast<const unsigned char*>(run.bytes.data());
  size_t len = run.bytes.size();
  if (len < n) return;
  uint64_t mask = pack_mask(n);
  uint64_t w = 0;
  for (size_t i = 0; i + 1 < n; ++i) w = (w << 8) | p[i];
  for (size_t i = n - 1; i < len; ++i) {
    w = ((w << 8) | p[i]) & mask;
    fn(w);
  }
}

// Open-addressing table tuned for the counting hot loop. A slot with count 0
// is empty, so the full 64-bit key range stays usable.
class PackedDfTable {
 public:
  explicit PackedDfTable(size_t initial_cap = 1 << 12) { rehash(initial_cap); }

  void observe(uint64_t key, uint32_t doc) {
    size_t idx = mix64(key) & mask_;
    for (;;) {
      Slot& s = slots_[idx];
      if (s.count == 0) {
        s = Slot{key, 1, doc};
        if (++size_ * 10 >= slots_.size() * 7) grow();
        return;
      }
      if (s.key == key) {
        if (s.last_doc != doc) {
          ++s.count;
          s.last_doc = doc;
        }
        return;
      }
      idx = (idx + 1) & mask_;
    }
  }

  size_t size() const { return size_; }

  template <typename Fn>  // Fn(uint64_t key, uint32_t count)
  void for_each(Fn&& fn) const {
    for (const Slot& s : slots_)
      if (s.count != 0) fn(s.key, s.count);
  }

 private:
  struct Slot {
    uint64_t key = 0;
    uint32_t count = 0;
    uint32_t last_doc = 0;
  };

  void rehash(size_t cap) {
    slots_.assign(cap, Slot{});
    mask_ = cap - 1;
  }

  void grow() {
    std::vector<Slot> old = std::move(slots_);
    rehash(old.size() * 2);
    for (const Slot& s : old) {
      if (s.count == 0) continue;
      size_t idx = mix64(s.key) & mask_;
      while (slots_[idx].count != 0) idx = (idx + 1) & mask_;
      slots_[idx] = s;
    }
  }

  std::vector<Slot> slots_;
  size_t mask_ = 0;
  size_t size_ = 0;
};

// Fallback for n > 8: value = (count, last_doc).
using WideDfTable = std::unordered_map<std::string, std::pair<uint32_t, uint32_t>>;

inline void observe_wide(WideDfTable& table, std::string_view gram, uint32_t doc) {
  auto [it, inserted] = table.try_emplace(std::string(gram), 1u, doc);
  if (!inserted && it->second.second != doc) {
    ++it->second.first;
    it->second.second = doc;
  }
}

}  // namespace detail

// Shard routing is stable across runs and identical for the packed and wide
// counting paths.
inline size_t shard_of(const NGram& gram, size_t shard_count) {
  uint64_t h = gram.size() <= 8 ? mix64(detail::pack_ngram(gram.bytes))
                                : hash_bytes64(gram.bytes);
  return static_cast<size_t>(h % shard_count);
}

// Pull-based single-pass input: returns streams until exhausted.
using ByteStreamSource = std::function<std::optional<ByteStream>()>;

namespace detail {

inline void merge_packed(DocFreqTable& out, const PackedDfTable& table, size_t n) {
  table.for_each([&](uint64_t key, uint32_t count) {
    out.entries[unpack_ngram(key, n)] += count;
  });
}

inline DocFreqTable count_in_memory(const ByteStreamSource& source, size_t n, size_t threads) {
  DocFreqTable out;
  out.n = n;

  std::mutex pull_mutex;
  uint32_t next_doc = 0;
  auto pull = [&](ByteStream& stream) -> std::optional<uint32_t> {
    std::lock_guard lock(pull_mutex);
    auto s = source();
    if (!s) return std::nullopt;
    stream = std::move(*s);
    return ++next_doc;
  };

  size_t workers = std::max<size_t>(1, threads);
  std::vector<detail::PackedDfTable> packed;
  std::vector<detail::WideDfTable> wide(workers);
  packed.reserve(workers);
  for (size_t i = 0; i < workers; ++i) packed.emplace_back();

  parallel_for(workers, [&](size_t w) {
    ByteStream stream;
    while (auto doc = pull(stream)) {
      for (const auto& run : stream.runs) {
        if (n <= 8) {
          detail::for_each_window(run, n, [&](uint64_t key) { packed[w].observe(key, *doc); });
        } else {
          for (size_t i = 0; i + n <= run.bytes.size(); ++i)
            detail::observe_wide(wide[w], std::string_view(run.bytes).substr(i, n), *doc);
        }
      }
    }
  }, workers);

  out.corpus_size = next_doc;
  for (size_t w = 0; w < workers; ++w) {
    merge_packed(out, packed[w], n);
    for (const auto& [gram, cd] : wide[w]) out.entries[NGram(gram)] += cd.first;
  }
  return out;
}

inline DocFreqTable count_with_spill(const ByteStreamSource& source, size_t n, size_t shard_count,
                                     std::filesystem::path spill_dir, size_t threads) {
  namespace fs = std::filesystem;
  bool own_dir = spill_dir.empty();
  if (own_dir) {
    static std::atomic<uint64_t> spill_serial{0};
    std::random_device rd;
    spill_dir = fs::temp_directory_path() /
                ("gramsight-spill-" + std::to_string(rd()) + "-" +
                 std::to_string(spill_serial.fetch_add(1)));
  }
  std::error_code ec;
  fs::create_directories(spill_dir, ec);
  if (ec) throw CountingError("cannot create spill dir " + spill_dir.string());

  auto shard_path = [&](size_t s) {
    return spill_dir / ("shard_" + std::to_string(s) + ".bin");
  };

  // Map phase: one record (n raw bytes) per distinct n-gram per document.
  std::vector<std::ofstream> writers(shard_count);
  for (size_t s = 0; s < shard_count; ++s) {
    writers[s].open(shard_path(s), std::ios::binary | std::ios::trunc);
    if (!writers[s]) throw CountingError("shard spill open failed for shard " + std::to_string(s));
  }

  uint64_t corpus_size = 0;
  std::vector<uint64_t> packed_buf;
  std::set<std::string> wide_buf;
  while (auto stream = source()) {
    ++corpus_size;
    if (n <= 8) {
      packed_buf.clear();
      for (const auto& run : stream->runs)
        detail::for_each_window(run, n, [&](uint64_t key) { packed_buf.push_back(key); });
      std::sort(packed_buf.begin(), packed_buf.end());
      packed_buf.erase(std::unique(packed_buf.begin(), packed_buf.end()), packed_buf.end());
      for (uint64_t key : packed_buf) {
        size_t s = static_cast<size_t>(mix64(key) % shard_count);
        std::string bytes = unpack_ngram(key, n).bytes;
        writers[s].write(bytes.data(), static_cast<std::streamsize>(n));
      }
    } else {
      wide_buf.clear();
      for (const auto& run : stream->runs)
        for (size_t i = 0; i + n <= run.bytes.size(); ++i)
          wide_buf.insert(std::string(std::string_view(run.bytes).substr(i, n)));
      for (const auto& gram : wide_buf) {
        size_t s = static_cast<size_t>(hash_bytes64(gram) % shard_count);
        writers[s].write(gram.data(), static_cast<std::streamsize>(n));
      }
    }
  }
  for (size_t s = 0; s < shard_count; ++s) {
    writers[s].close();
    if (!writers[s]) throw CountingError("shard spill write failed for shard " + std::to_string(s));
  }

  // Reduce phase: shards are disjoint by construction; records were deduped
  // per document, so each record adds one to its n-gram's count.
  DocFreqTable out;
  out.n = n;
  out.corpus_size = corpus_size;
  std::vector<std::map<NGram, uint32_t>> per_shard(shard_count);
  std::vector<std::string> shard_error(shard_count);
  parallel_for(shard_count, [&](size_t s) {
    std::ifstream in(shard_path(s), std::ios::binary);
    if (!in) {
      shard_error[s] = "shard read failed for shard " + std::to_string(s);
      return;
    }
    std::string rec(n, '\0');
    while (in.read(rec.data(), static_cast<std::streamsize>(n)))
      ++per_shard[s][NGram(rec)];
    if (in.gcount() != 0) shard_error[s] = "truncated shard file for shard " + std::to_string(s);
  }, threads);
  for (size_t s = 0; s < shard_count; ++s)
    if (!shard_error[s].empty()) throw CountingError(shard_error[s]);
  for (size_t s = 0; s < shard_count; ++s)
    for (const auto& [gram, count] : per_shard[s]) out.entries[gram] += count;

  std::error_code rm;
  if (own_dir) fs::remove_all(spill_dir, rm);
  else
    for (size_t s = 0; s < shard_count; ++s) fs::remove(shard_path(s), rm);
  return out;
}

}  // namespace detail

// Exact per-n-gram document counts in a single pass over the corpus. With
// shard_count > 1 the counting is partitioned by n-gram hash through spill
// files so peak memory is bounded by the largest shard.
inline DocFreqTable count_document_frequency(const ByteStreamSource& source, size_t n,
                                             size_t shard_count = 1,
                                             const std::filesystem::path& spill_dir = {},
                                             size_t threads = 1) {
  if (n < 1) throw std::invalid_argument("count_document_frequency: n must be >= 1");
  if (shard_count < 1) throw std::invalid_argument("count_document_frequency: shard_count must be >= 1");
  if (shard_count == 1) return detail::count_in_memory(source, n, threads);
  return detail::count_with_spill(source, n, shard_count, spill_dir, threads);
}

inline DocFreqTable count_document_frequency(const std::vector<ByteStream>& corpus, size_t n,
                                             size_t shard_count = 1,
                                             const std::filesystem::path& spill_dir = {},
                                             size_t threads = 1) {
  size_t next = 0;
  ByteStreamSource source = [&]() -> std::optional<ByteStream> {
    if (next >= corpus.size()) return std::nullopt;
    return corpus[next++];
  };
  return count_document_frequency(source, n, shard_count, spill_dir, threads);
}

// Exactly the n-grams appearing in at least min_df documents.
inline std::set<NGram> filter_by_frequency(const DocFreqTable& table, uint32_t min_df) {
  if (min_df < 1) throw std::invalid_argument("filter_by_frequency: min_df must be >= 1");
  std::set<NGram> out;
  for (const auto& [gram, count] : table.entries)
    if (count >= min_df) out.insert(gram);
  return out;
}

// Line format: `HEXGRAM<TAB>count`, sorted by hex; reload is bit-exact.
inline std::string render_df_table(const DocFreqTable& table) {
  std::string out = "# gramsight-df v1 n=" + std::to_string(table.n) +
                    " corpus_size=" + std::to_string(table.corpus_size) + "\n";
  for (const auto& [gram, count] : table.entries)
    out += gram.hex() + "\t" + std::to_string(count) + "\n";
  return out;
}

inline DocFreqTable parse_df_table(std::string_view text) {
  DocFreqTable table;
  size_t pos = 0;
  size_t line_no = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.find("gramsight-df v1") == std::string_view::npos)
        throw ParseError("df table: unrecognized header");
      size_t np = line.find("n=");
      size_t cp = line.find("corpus_size=");
      if (np == std::string_view::npos || cp == std::string_view::npos)
        throw ParseError("df table: malformed header");
      table.n = std::stoul(std::string(line.substr(np + 2)));
      table.corpus_size = std::stoull(std::string(line.substr(cp + 12)));
      continue;
    }
    size_t tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw ParseError("df table line " + std::to_string(line_no) + ": missing tab");
    NGram gram = NGram::from_hex(line.substr(0, tab));
    table.entries[gram] = static_cast<uint32_t>(std::stoul(std::string(line.substr(tab + 1))));
  }
  return table;
}

}  // namespace gramsight
