#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gramsight/hex.hpp"

namespace gramsight {

// One line of a disassembly listing. Lines that do not parse as
// `.section:ADDRESS bytes... text` are kept as text-only entries so the
// listing preserves file order and line count.
struct AsmLine {
  std::string section;
  std::optional<uint32_t> address;
  uint8_t addr_digits = 0;  // width of the hex address field, for round-trip
  std::string bytes;        // raw instruction bytes, possibly empty
  std::string text;         // mnemonic + operands (or the whole line if unparsed)
  std::string raw;          // original line, verbatim

  bool has_address() const { return address.has_value(); }
  uint32_t covered_begin() const { return *address; }
  uint32_t covered_end() const { return *address + static_cast<uint32_t>(bytes.size()); }
};

struct AsmListing {
  std::vector<AsmLine> lines;
  size_t parsed_count = 0;
  size_t skipped_count = 0;
};

namespace detail {

// Listing byte columns are uppercase hex; lowercase pairs like `db` are
// directives and must not be eaten as bytes.
inline std::optional<uint8_t> parse_listing_byte(std::string_view tok) {
  if (tok.size() != 2) return std::nullopt;
  auto upper = [](char c) { return (c >= '0' && c <= '9') || (c >= 'A' && c <= 'F'); };
  if (!upper(tok[0]) || !upper(tok[1])) return std::nullopt;
  return static_cast<uint8_t>(hex_value(tok[0]) * 16 + hex_value(tok[1]));
}

inline bool parse_asm_line(std::string_view line, AsmLine& out) {
  size_t colon = line.find(':');
  if (colon == std::string_view::npos || colon == 0) return false;
  std::string_view section = line.substr(0, colon);
  for (char c : section)
    if (c == ' ' || c == '\t') return false;

  size_t apos = colon + 1;
  size_t aend = apos;
  while (aend < line.size() && is_hex_digit(line[aend])) ++aend;
  size_t digits = aend - apos;
  if (digits == 0 || digits > 8) return false;
  if (aend < line.size() && line[aend] != ' ' && line[aend] != '\t') return false;
  auto addr = parse_hex_u32(line.substr(apos, digits));
  if (!addr) return false;

  out.section = std::string(section);
  out.address = *addr;
  out.addr_digits = static_cast<uint8_t>(digits);

  size_t i = aend;
  while (true) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    size_t j = line.find_first_of(" \t", i);
    if (j == std::string_view::npos) j = line.size();
    auto byte = parse_listing_byte(line.substr(i, j - i));
    if (!byte) {
      out.text = std::string(trim(line.substr(i)));
      break;
    }
    out.bytes.push_back(static_cast<char>(*byte));
    i = j;
  }
  return true;
}

}  // namespace detail

// Every input line yields exactly one entry, in file order.
inline AsmListing parse_asm_listing(std::string_view text) {
  AsmListing out;
  if (text.empty()) return out;

  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    bool last = eol == std::string_view::npos;
    std::string_view raw = text.substr(pos, last ? text.size() - pos : eol - pos);
    pos = last ? text.size() + 1 : eol + 1;
    if (last && raw.empty()) break;  // no trailing empty line after final '\n'

    AsmLine line;
    line.raw = std::string(raw);
    std::string_view body = detail::trim(raw);
    if (!body.empty() && detail::parse_asm_line(body, line)) {
      ++out.parsed_count;
    } else {
      line.text = std::string(body);
      ++out.skipped_count;
    }
    out.lines.push_back(std::move(line));
  }
  return out;
}

}  // namespace gramsight
