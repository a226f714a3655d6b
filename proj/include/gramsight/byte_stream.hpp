#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gramsight/hex.hpp"

namespace gramsight {

// One maximal stretch of readable bytes at consecutive addresses.
struct ByteRun {
  uint32_t start = 0;
  std::string bytes;

  uint32_t end() const { return start + static_cast<uint32_t>(bytes.size()); }
};

// Parsed byte content of one sample. Runs are address-sorted, non-overlapping
// and never contain an unreadable-byte marker; `??` tokens and address
// discontinuities in the dump split runs.
struct ByteStream {
  std::string sample_id;
  std::vector<ByteRun> runs;

  size_t byte_count() const {
    size_t n = 0;
    for (const auto& r : runs) n += r.bytes.size();
    return n;
  }
};

// Parses a hex dump: each nonempty line is an address followed by
// whitespace-separated two-digit hex tokens or `??` markers. Readable bytes at
// consecutive addresses merge into one run, including across line boundaries.
inline ByteStream parse_hex_dump(std::string_view text, std::string sample_id) {
  ByteStream out;
  out.sample_id = std::move(sample_id);

  ByteRun cur;
  bool in_run = false;
  bool have_last = false;
  uint64_t next_addr = 0;  // address the next byte token will occupy

  auto flush = [&] {
    if (in_run && !cur.bytes.empty()) out.runs.push_back(std::move(cur));
    cur = ByteRun{};
    in_run = false;
  };

  size_t line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    line = detail::trim(line);
    if (line.empty()) continue;

    size_t ws = line.find_first_of(" \t");
    if (ws == std::string_view::npos)
      throw ParseError("hex dump line " + std::to_string(line_no) + ": missing byte tokens");
    auto addr = parse_hex_u32(line.substr(0, ws));
    if (!addr)
      throw ParseError("hex dump line " + std::to_string(line_no) + ": bad address '" +
                       std::string(line.substr(0, ws)) + "'");
    if (have_last && *addr < next_addr)
      throw ParseError("hex dump line " + std::to_string(line_no) + ": non-monotonic address");
    if (have_last && *addr != next_addr) flush();  // gap between lines
    next_addr = *addr;
    have_last = true;

    size_t i = ws;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      if (i >= line.size()) break;
      size_t j = line.find_first_of(" \t", i);
      if (j == std::string_view::npos) j = line.size();
      std::string_view tok = line.substr(i, j - i);
      i = j;

      if (tok == "??") {
        flush();
        ++next_addr;
        continue;
      }
      auto byte = parse_byte_token(tok);
      if (!byte)
        throw ParseError("hex dump line " + std::to_string(line_no) + ": bad byte token '" +
                         std::string(tok) + "'");
      if (!in_run) {
        cur.start = static_cast<uint32_t>(next_addr);
        in_run = true;
      }
      cur.bytes.push_back(static_cast<char>(*byte));
      ++next_addr;
    }
  }
  flush();
  return out;
}

// Re-renders a stream in the canonical dump layout (16 bytes per line, runs
// separated by address jumps). parse_hex_dump(render_hex_dump(s)) == s.
inline std::string render_hex_dump(const ByteStream& stream, size_t bytes_per_line = 16) {
  std::string out;
  for (const auto& run : stream.runs) {
    for (size_t off = 0; off < run.bytes.size(); off += bytes_per_line) {
      out += format_address(run.start + static_cast<uint32_t>(off));
      size_t end = std::min(off + bytes_per_line, run.bytes.size());
      for (size_t i = off; i < end; ++i) {
        unsigned char b = static_cast<unsigned char>(run.bytes[i]);
        out.push_back(' ');
        out.push_back(kHexDigits[b >> 4]);
        out.push_back(kHexDigits[b & 0xF]);
      }
      out.push_back('\n');
    }
  }
  return out;
}

}  // namespace gramsight
