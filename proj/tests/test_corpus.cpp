#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "gramsight/asm_listing.hpp"
#include "gramsight/byte_stream.hpp"
#include "gramsight/corpus.hpp"

using namespace gramsight;

namespace {

const char* kAppendixListing =
    ".text:0063597F 8B EC                mov     ebp, esp\n"
    ".text:00635981 83 EC 28             sub     esp, 28h\n"
    ".text:00635984 8D 86 C0 FE FF FF    lea     eax, [esi-140h]\n"
    ".text:0063598A 13 D0                adc     edx, eax\n"
    ".text:0063598C 50                   push    eax\n"
    ".text:0063598D 6A 00                push    0\n"
    ".text:0063598F E8 B8 FD FF FF       call    loc_63574C\n"
    ".text:00635994 83 C4 04             add     esp, 4\n"
    ".text:00635997 58                   pop     eax\n"
    ".text:00635998 50                   push    eax\n";

}  // namespace

TEST_CASE("hex dump: single line forms one run", "[corpus]") {
  auto stream = parse_hex_dump("0063598C 50 6A 00", "s1");
  REQUIRE(stream.runs.size() == 1);
  CHECK(stream.runs[0].start == 0x63598Cu);
  CHECK(stream.runs[0].bytes == std::string("\x50\x6A\x00", 3));
}

TEST_CASE("hex dump: empty text yields zero runs", "[corpus]") {
  auto stream = parse_hex_dump("", "s1");
  CHECK(stream.runs.empty());
  CHECK(stream.byte_count() == 0);
}

TEST_CASE("hex dump: ?? marker splits runs and consumes an address", "[corpus]") {
  auto stream = parse_hex_dump("0000 AA ?? BB", "s1");
  REQUIRE(stream.runs.size() == 2);
  CHECK(stream.runs[0].start == 0);
  CHECK(stream.runs[0].bytes == std::string("\xAA", 1));
  CHECK(stream.runs[1].start == 2);
  CHECK(stream.runs[1].bytes == std::string("\xBB", 1));
}

TEST_CASE("hex dump: consecutive lines merge into one run", "[corpus]") {
  auto stream = parse_hex_dump("0100 01 02 03\n0103 04 05", "s1");
  REQUIRE(stream.runs.size() == 1);
  CHECK(stream.runs[0].start == 0x100u);
  CHECK(stream.runs[0].bytes.size() == 5);
}

TEST_CASE("hex dump: address discontinuity splits runs", "[corpus]") {
  auto stream = parse_hex_dump("0100 01 02\n0110 03 04", "s1");
  REQUIRE(stream.runs.size() == 2);
  CHECK(stream.runs[1].start == 0x110u);
}

TEST_CASE("hex dump: malformed token and bad addresses are parse errors", "[corpus]") {
  CHECK_THROWS_AS(parse_hex_dump("0000 GG", "s"), ParseError);
  CHECK_THROWS_AS(parse_hex_dump("0000 AAA", "s"), ParseError);
  CHECK_THROWS_AS(parse_hex_dump("XYZ 00", "s"), ParseError);
  CHECK_THROWS_AS(parse_hex_dump("0100 01 02\n0100 03", "s"), ParseError);  // non-monotonic
  CHECK_THROWS_MATCHES(parse_hex_dump("0000 AA\nZZ 00", "s"), ParseError,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("line 2")));
}

TEST_CASE("hex dump: render/parse round trip", "[corpus]") {
  auto stream = parse_hex_dump("00400000 DE AD BE EF ?? 01 02\n00400010 99", "s1");
  auto rendered = render_hex_dump(stream);
  auto reparsed = parse_hex_dump(rendered, "s1");
  REQUIRE(reparsed.runs.size() == stream.runs.size());
  for (size_t i = 0; i < stream.runs.size(); ++i) {
    CHECK(reparsed.runs[i].start == stream.runs[i].start);
    CHECK(reparsed.runs[i].bytes == stream.runs[i].bytes);
  }
}

TEST_CASE("asm listing: appendix line parses exactly", "[corpus]") {
  auto listing = parse_asm_listing(".text:0063598F E8 B8 FD FF FF call loc_63574C");
  REQUIRE(listing.lines.size() == 1);
  const auto& line = listing.lines[0];
  CHECK(line.section == ".text");
  REQUIRE(line.has_address());
  CHECK(*line.address == 0x63598Fu);
  CHECK(line.bytes == std::string("\xE8\xB8\xFD\xFF\xFF", 5));
  CHECK(line.text == "call loc_63574C");
  // exact round trip of the hex address field
  CHECK(format_address(*line.address) == "0063598F");
  CHECK(line.addr_digits == 8);
}

TEST_CASE("asm listing: empty text yields empty listing", "[corpus]") {
  auto listing = parse_asm_listing("");
  CHECK(listing.lines.empty());
  CHECK(listing.parsed_count == 0);
  CHECK(listing.skipped_count == 0);
}

TEST_CASE("asm listing: ten lines give ten entries in order, count preserved", "[corpus]") {
  auto listing = parse_asm_listing(kAppendixListing);
  REQUIRE(listing.lines.size() == 10);
  CHECK(listing.parsed_count + listing.skipped_count == 10);
  CHECK(listing.parsed_count == 10);
  CHECK(*listing.lines[0].address == 0x63597Fu);
  CHECK(*listing.lines[9].address == 0x635998u);
  CHECK(listing.lines[6].text == "call    loc_63574C");
}

TEST_CASE("asm listing: unparsable lines kept as text-only entries", "[corpus]") {
  auto listing = parse_asm_listing("; comment header\n.text:00401000 90 nop\nloc_40:\n");
  REQUIRE(listing.lines.size() == 3);
  CHECK(!listing.lines[0].has_address());
  CHECK(listing.lines[1].has_address());
  CHECK(!listing.lines[2].has_address());
  CHECK(listing.parsed_count == 1);
  CHECK(listing.skipped_count == 2);
}

TEST_CASE("asm listing: lowercase directives are not eaten as bytes", "[corpus]") {
  auto listing = parse_asm_listing(".data:00402000 4D 5A db 4Dh");
  REQUIRE(listing.lines.size() == 1);
  CHECK(listing.lines[0].bytes == std::string("\x4D\x5A", 2));
  CHECK(listing.lines[0].text == "db 4Dh");
}

TEST_CASE("manifest parses ids and labels", "[corpus]") {
  auto corpus = parse_manifest("Id,Class\nabc,1\ndef,3\nghi,3\n");
  REQUIRE(corpus.size() == 3);
  CHECK(corpus.samples[0] == std::pair<std::string, int>{"abc", 1});
  CHECK(corpus.class_labels() == std::vector<int>{1, 3});
  CHECK(corpus.class_name(3) == "Kelihos_ver3");
  CHECK_THROWS_AS(parse_manifest("Nope,Header\n"), ParseError);
  CHECK_THROWS_AS(parse_manifest("Id,Class\nabc,1\nabc,2\n"), ParseError);
}

TEST_CASE("stratified partition balances classes within one", "[corpus]") {
  LabeledCorpus corpus;
  std::map<int, int> class_sizes = {{1, 41}, {2, 20}, {3, 147}};
  for (auto [label, count] : class_sizes)
    for (int i = 0; i < count; ++i)
      corpus.samples.emplace_back("c" + std::to_string(label) + "_" + std::to_string(i), label);

  const size_t k = 20;
  auto parts = stratified_partition(corpus, k, 7);
  REQUIRE(parts.size() == k);

  std::set<std::string> all;
  std::map<std::string, int> label_of;
  for (const auto& [id, label] : corpus.samples) label_of[id] = label;
  for (const auto& part : parts)
    for (const auto& id : part) CHECK(all.insert(id).second);  // disjoint
  CHECK(all.size() == corpus.size());  // exhaustive

  for (auto [label, count] : class_sizes) {
    int lo = count, hi = 0;
    for (const auto& part : parts) {
      int c = 0;
      for (const auto& id : part)
        if (label_of[id] == label) ++c;
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    CHECK(hi - lo <= 1);
    CHECK(lo == count / static_cast<int>(k));
  }
}

TEST_CASE("stratified partition is deterministic and validates k", "[corpus]") {
  LabeledCorpus corpus;
  corpus.samples = {{"a", 1}, {"b", 1}};
  auto p1 = stratified_partition(corpus, 2, 99);
  auto p2 = stratified_partition(corpus, 2, 99);
  CHECK(p1 == p2);
  CHECK(p1[0].size() == 1);
  CHECK(p1[1].size() == 1);
  CHECK_THROWS_AS(stratified_partition(corpus, 1, 0), std::invalid_argument);
}
