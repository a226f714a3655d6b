#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gramsight/asm_listing.hpp"
#include "gramsight/byte_stream.hpp"
#include "gramsight/interpret.hpp"
#include "gramsight/ngram.hpp"

namespace gramsight {

struct CodemapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// All byte-exact start addresses of the n-gram within single runs, ascending;
// overlapping matches included.
inline std::vector<uint32_t> locate_ngram(const ByteStream& stream, const NGram& gram) {
  std::vector<uint32_t> out;
  if (gram.size() == 0) throw std::invalid_argument("locate_ngram: empty n-gram");
  for (const auto& run : stream.runs) {
    if (run.bytes.size() < gram.size()) continue;
    for (size_t i = 0; i + gram.size() <= run.bytes.size(); ++i)
      if (run.bytes.compare(i, gram.size(), gram.bytes) == 0)
        out.push_back(run.start + static_cast<uint32_t>(i));
  }
  return out;
}

struct SnippetLine {
  size_t listing_index = 0;  // position in the listing
  std::string raw;           // the original listing line
  bool covered = false;
  size_t highlight_begin = 0;        // byte index range within the line's bytes
  size_t highlight_end = 0;          // empty range when nothing is highlighted
  std::string highlighted_bytes;     // the raw bytes inside the range
};

// A listing excerpt around one n-gram match: the covered instruction lines
// plus at most three context lines on each side. For a clean match the
// highlighted bytes, concatenated in address order, equal the n-gram; when
// the listing disagrees with the sample bytes `warning` says so.
struct CodeSnippet {
  NGram ngram;
  uint32_t match_address = 0;  // where highlight coverage begins in the listing
  std::vector<SnippetLine> lines;
  std::string warning;

  std::string highlighted_bytes() const {
    std::string out;
    for (const auto& line : lines) out += line.highlighted_bytes;
    return out;
  }
};

inline constexpr size_t kSnippetContextLines = 3;

// Covers [address, address + span) in the listing: the lines intersecting the
// interval, up to three context lines each side, and per-line highlighted
// byte index ranges.
inline CodeSnippet map_address_to_snippet(const AsmListing& listing, uint32_t address,
                                          size_t span) {
  if (listing.lines.empty()) throw CodemapError("map_address_to_snippet: empty listing");
  if (span == 0) throw std::invalid_argument("map_address_to_snippet: span must be >= 1");

  uint64_t begin = address;
  uint64_t end = static_cast<uint64_t>(address) + span;

  std::optional<size_t> first_covered, last_covered;
  for (size_t i = 0; i < listing.lines.size(); ++i) {
    const auto& line = listing.lines[i];
    if (!line.has_address() || line.bytes.empty()) continue;
    uint64_t lb = line.covered_begin(), le = line.covered_end();
    if (lb < end && begin < le) {
      if (!first_covered) first_covered = i;
      last_covered = i;
    }
  }
  if (!first_covered)
    throw CodemapError("map_address_to_snippet: address " + format_address(address) +
                       " not covered by any listing line");

  CodeSnippet snippet;
  snippet.match_address = address;
  size_t from = *first_covered >= kSnippetContextLines ? *first_covered - kSnippetContextLines : 0;
  size_t to = std::min(listing.lines.size() - 1, *last_covered + kSnippetContextLines);
  for (size_t i = from; i <= to; ++i) {
    const auto& line = listing.lines[i];
    SnippetLine out;
    out.listing_index = i;
    out.raw = line.raw;
    if (line.has_address() && !line.bytes.empty()) {
      uint64_t lb = line.covered_begin(), le = line.covered_end();
      if (lb < end && begin < le) {
        out.covered = true;
        out.highlight_begin = static_cast<size_t>(std::max(begin, lb) - lb);
        out.highlight_end = static_cast<size_t>(std::min(end, le) - lb);
        out.highlighted_bytes =
            line.bytes.substr(out.highlight_begin, out.highlight_end - out.highlight_begin);
      }
    }
    snippet.lines.push_back(std::move(out));
  }
  return snippet;
}

namespace detail {

// Contiguous byte segments of the listing: consecutive lines whose addresses
// chain without gaps, in file order.
struct ListingSegment {
  uint32_t start = 0;
  std::string bytes;
};

inline std::vector<ListingSegment> listing_segments(const AsmListing& listing) {
  std::vector<ListingSegment> segments;
  ListingSegment cur;
  bool open = false;
  for (const auto& line : listing.lines) {
    if (!line.has_address() || line.bytes.empty()) continue;
    if (open && line.covered_begin() == cur.start + cur.bytes.size()) {
      cur.bytes += line.bytes;
      continue;
    }
    if (open && !cur.bytes.empty()) segments.push_back(std::move(cur));
    cur = {line.covered_begin(), line.bytes};
    open = true;
  }
  if (open && !cur.bytes.empty()) segments.push_back(std::move(cur));
  return segments;
}

}  // namespace detail

// Pattern-aware snippet: finds the n-gram's bytes in the listing nearest to
// the hinted address and highlights that occurrence, which keeps the
// round-trip exact even when the sample's dump and the listing disagree by a
// few bytes. Falls back to geometric coverage (with a warning) when the bytes
// are nowhere near.
inline std::optional<CodeSnippet> snippet_for_ngram(const AsmListing& listing, const NGram& gram,
                                                    uint32_t hint_address) {
  std::optional<uint32_t> best;
  for (const auto& segment : detail::listing_segments(listing)) {
    for (size_t i = 0; i + gram.size() <= segment.bytes.size(); ++i) {
      if (segment.bytes.compare(i, gram.size(), gram.bytes) != 0) continue;
      uint32_t p = segment.start + static_cast<uint32_t>(i);
      auto distance = [&](uint32_t a) {
        return a >= hint_address ? a - hint_address : hint_address - a;
      };
      if (!best || distance(p) < distance(*best) || (distance(p) == distance(*best) && p < *best))
        best = p;
    }
  }

  if (best) {
    auto snippet = map_address_to_snippet(listing, *best, gram.size());
    snippet.ngram = gram;
    if (*best != hint_address)
      snippet.warning = "listing bytes at " + format_address(hint_address) +
                        " differ from the sample; n-gram matched at " + format_address(*best);
    return snippet;
  }

  try {
    auto snippet = map_address_to_snippet(listing, hint_address, gram.size());
    snippet.ngram = gram;
    snippet.warning = "listing bytes at " + format_address(hint_address) +
                      " do not contain the n-gram; highlight shows the addressed range";
    return snippet;
  } catch (const CodemapError&) {
    return std::nullopt;
  }
}

// For each of the top-k ranked features present in the stream, one snippet per
// match, ordered by feature rank then address.
inline std::vector<CodeSnippet> annotate_sample(const ByteStream& stream,
                                                const AsmListing& listing,
                                                const RankedFeatures& ranked, size_t top_k) {
  std::vector<CodeSnippet> out;
  for (const auto& entry : ranked.top(top_k)) {
    for (uint32_t address : locate_ngram(stream, entry.ngram)) {
      if (auto snippet = snippet_for_ngram(listing, entry.ngram, address))
        out.push_back(std::move(*snippet));
    }
  }
  return out;
}

}  // namespace gramsight
