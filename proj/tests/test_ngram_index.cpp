#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <map>
#include <random>
#include <set>

#include "gramsight/byte_stream.hpp"
#include "gramsight/ngram_index.hpp"
#include "gramsight/vocabulary.hpp"

using namespace gramsight;

namespace {

ByteStream stream_of(std::initializer_list<std::pair<uint32_t, std::string>> runs,
                     std::string id = "s") {
  ByteStream s;
  s.sample_id = std::move(id);
  for (auto& [start, bytes] : runs) s.runs.push_back({start, bytes});
  return s;
}

ByteStream random_stream(std::mt19937_64& rng, size_t max_bytes) {
  ByteStream s;
  s.sample_id = "r" + std::to_string(rng());
  uint32_t addr = static_cast<uint32_t>(rng() % 1000);
  size_t n_runs = 1 + rng() % 4;
  for (size_t r = 0; r < n_runs; ++r) {
    size_t len = rng() % (max_bytes / n_runs + 1);
    std::string bytes;
    for (size_t i = 0; i < len; ++i)
      bytes.push_back(static_cast<char>(rng() % 8));  // tiny alphabet -> collisions
    s.runs.push_back({addr, bytes});
    addr += static_cast<uint32_t>(len + 1 + rng() % 10);
  }
  return s;
}

// Independent oracle: per-document n-gram sets via extract_ngrams, counted in
// a plain map.
DocFreqTable naive_df(const std::vector<ByteStream>& corpus, size_t n) {
  DocFreqTable table;
  table.n = n;
  table.corpus_size = corpus.size();
  for (const auto& doc : corpus)
    for (const auto& gram : extract_ngrams(doc, n)) ++table.entries[gram];
  return table;
}

}  // namespace

TEST_CASE("extract_ngrams: appendix 6-gram", "[ngram_index]") {
  auto s = stream_of({{0x100, std::string("\xD0\x50\x6A\x00\xE8\xB8", 6)}});
  auto grams = extract_ngrams(s, 6);
  REQUIRE(grams.size() == 1);
  CHECK(grams.begin()->hex() == "D0506A00E8B8");
}

TEST_CASE("extract_ngrams: short runs contribute nothing", "[ngram_index]") {
  auto s = stream_of({{0, std::string(5, '\x41')}});
  CHECK(extract_ngrams(s, 6).empty());
}

TEST_CASE("extract_ngrams: window count bound and gap rule", "[ngram_index]") {
  std::mt19937_64 rng(42);
  for (int iter = 0; iter < 50; ++iter) {
    auto s = random_stream(rng, 60);
    size_t n = 1 + rng() % 7;
    auto grams = extract_ngrams(s, n);
    size_t bound = 0;
    for (const auto& run : s.runs)
      if (run.bytes.size() >= n) bound += run.bytes.size() - n + 1;
    CHECK(grams.size() <= bound);
    for (const auto& g : grams) CHECK(g.size() == n);

    // splitting a run at an interior point removes exactly the windows that
    // crossed the split
    if (!s.runs.empty() && s.runs[0].bytes.size() > n) {
      const auto& run = s.runs[0];
      size_t cut = 1 + rng() % (run.bytes.size() - 1);
      ByteStream split = s;
      split.runs[0].bytes = run.bytes.substr(0, cut);
      ByteRun tail{run.start + static_cast<uint32_t>(cut), run.bytes.substr(cut)};
      split.runs.insert(split.runs.begin() + 1, tail);

      auto split_grams = extract_ngrams(split, n);
      std::set<NGram> crossing;
      for (size_t i = cut < n ? 0 : cut - n + 1; i < cut && i + n <= run.bytes.size(); ++i)
        crossing.insert(NGram(run.bytes.substr(i, n)));
      std::set<NGram> expected = grams;
      for (const auto& g : crossing)
        if (!split_grams.count(g)) expected.erase(g);
      CHECK(split_grams == expected);
    }
  }
}

TEST_CASE("df: three-document letter example", "[ngram_index]") {
  // doc1={A}, doc2={A,B}, doc3={B} with single-byte "n-grams"
  std::vector<ByteStream> corpus = {
      stream_of({{0, "A"}}, "d1"),
      stream_of({{0, "AB"}}, "d2"),
      stream_of({{0, "B"}}, "d3"),
  };
  auto table = count_document_frequency(corpus, 1);
  CHECK(table.corpus_size == 3);
  CHECK(table.entries.at(NGram("A")) == 2);
  CHECK(table.entries.at(NGram("B")) == 2);
}

TEST_CASE("df: empty corpus and multiplicity", "[ngram_index]") {
  auto empty = count_document_frequency(std::vector<ByteStream>{}, 6);
  CHECK(empty.entries.empty());
  CHECK(empty.corpus_size == 0);

  // same n-gram 10 times in one document counts once
  std::string bytes;
  for (int i = 0; i < 10; ++i) bytes += std::string("\x01\x02\x03\x04\x05\x06", 6) + "\xFF";
  auto table = count_document_frequency({stream_of({{0, bytes}}, "d")}, 6);
  CHECK(table.entries.at(NGram::from_hex("010203040506")) == 1);
}

TEST_CASE("df: sharded counting equals naive oracle", "[ngram_index]") {
  std::mt19937_64 rng(7);
  auto tmp = std::filesystem::temp_directory_path() / "gramsight-test-shards";
  for (int iter = 0; iter < 8; ++iter) {
    std::vector<ByteStream> corpus;
    size_t docs = rng() % 40;
    for (size_t d = 0; d < docs; ++d) corpus.push_back(random_stream(rng, 200));
    size_t n = 1 + rng() % 8;
    auto expected = naive_df(corpus, n);
    for (size_t shards : {size_t(1), size_t(4), size_t(16)}) {
      auto got = count_document_frequency(corpus, n, shards, tmp);
      CHECK(got.corpus_size == expected.corpus_size);
      CHECK(got.entries == expected.entries);
    }
  }
}

TEST_CASE("df: wide n-grams (n > 8) count identically", "[ngram_index]") {
  std::mt19937_64 rng(13);
  std::vector<ByteStream> corpus;
  for (int d = 0; d < 12; ++d) corpus.push_back(random_stream(rng, 100));
  auto expected = naive_df(corpus, 10);
  auto got1 = count_document_frequency(corpus, 10, 1);
  auto got4 = count_document_frequency(corpus, 10, 4);
  CHECK(got1.entries == expected.entries);
  CHECK(got4.entries == expected.entries);
}

TEST_CASE("df: monotone under adding a document", "[ngram_index]") {
  std::mt19937_64 rng(99);
  std::vector<ByteStream> corpus;
  for (int d = 0; d < 10; ++d) corpus.push_back(random_stream(rng, 80));
  auto before = count_document_frequency(corpus, 3);
  corpus.push_back(random_stream(rng, 80));
  auto after = count_document_frequency(corpus, 3);
  for (const auto& [gram, count] : before.entries) {
    REQUIRE(after.entries.count(gram));
    CHECK(after.entries.at(gram) >= count);
  }
}

TEST_CASE("df: parallel counting matches single-threaded", "[ngram_index]") {
  std::mt19937_64 rng(123);
  std::vector<ByteStream> corpus;
  for (int d = 0; d < 30; ++d) corpus.push_back(random_stream(rng, 150));
  auto seq = count_document_frequency(corpus, 4, 1, {}, 1);
  auto par = count_document_frequency(corpus, 4, 1, {}, 4);
  CHECK(seq.entries == par.entries);
  CHECK(seq.corpus_size == par.corpus_size);
}

TEST_CASE("filter_by_frequency boundary", "[ngram_index]") {
  DocFreqTable table;
  table.n = 1;
  table.corpus_size = 200;
  table.entries[NGram("A")] = 99;
  table.entries[NGram("B")] = 100;
  auto kept = filter_by_frequency(table, 100);
  CHECK(kept == std::set<NGram>{NGram("B")});
  CHECK(filter_by_frequency(table, 1).size() == 2);
  CHECK_THROWS_AS(filter_by_frequency(table, 0), std::invalid_argument);
}

TEST_CASE("df table round trips through text exactly", "[ngram_index]") {
  std::mt19937_64 rng(5);
  std::vector<ByteStream> corpus;
  for (int d = 0; d < 10; ++d) corpus.push_back(random_stream(rng, 64));
  auto table = count_document_frequency(corpus, 2);
  auto text = render_df_table(table);
  auto reloaded = parse_df_table(text);
  CHECK(reloaded.entries == table.entries);
  CHECK(reloaded.corpus_size == table.corpus_size);
  CHECK(reloaded.n == table.n);
  CHECK(render_df_table(reloaded) == text);  // bit-exact
}

TEST_CASE("vectorize: containment, empty stream, run order", "[ngram_index]") {
  FeatureVocabulary vocab({NGram::from_hex("00008B5DE43B"), NGram::from_hex("D0506A00E8B8")});
  auto s = stream_of({{0x10, std::string("\x00\x00\x8B\x5D\xE4\x3B", 6)}});
  CHECK(vectorize(s, vocab) == std::vector<uint32_t>{0});

  ByteStream empty;
  empty.sample_id = "e";
  CHECK(vectorize(empty, vocab).empty());

  auto two = stream_of({{0x10, std::string("\x00\x00\x8B\x5D\xE4\x3B", 6)},
                        {0x100, std::string("\xD0\x50\x6A\x00\xE8\xB8", 6)}});
  auto reversed = stream_of({{0x10, std::string("\xD0\x50\x6A\x00\xE8\xB8", 6)},
                             {0x100, std::string("\x00\x00\x8B\x5D\xE4\x3B", 6)}});
  CHECK(vectorize(two, vocab) == std::vector<uint32_t>{0, 1});
  CHECK(vectorize(reversed, vocab) == std::vector<uint32_t>{0, 1});
  CHECK(vectorize(two, vocab) == vectorize(two, vocab));  // idempotent
}

TEST_CASE("vocabulary round trips with order preserved", "[ngram_index]") {
  FeatureVocabulary vocab({NGram::from_hex("FFFF"), NGram::from_hex("0001"), NGram::from_hex("ABCD")});
  auto text = render_vocabulary(vocab);
  auto reloaded = parse_vocabulary(text);
  REQUIRE(reloaded.size() == 3);
  CHECK(reloaded.ngrams == vocab.ngrams);
  CHECK(render_vocabulary(reloaded) == text);
  CHECK(*reloaded.column_of(NGram::from_hex("0001")) == 1);
}
