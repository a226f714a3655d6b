#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gramsight {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr char kHexDigits[] = "0123456789ABCDEF";

inline int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

inline bool is_hex_digit(char c) { return hex_value(c) >= 0; }

// Two hex digits -> byte, or nullopt on any malformed input.
inline std::optional<uint8_t> parse_byte_token(std::string_view tok) {
  if (tok.size() != 2) return std::nullopt;
  int hi = hex_value(tok[0]);
  int lo = hex_value(tok[1]);
  if (hi < 0 || lo < 0) return std::nullopt;
  return static_cast<uint8_t>(hi * 16 + lo);
}

inline std::optional<uint32_t> parse_hex_u32(std::string_view tok) {
  if (tok.empty() || tok.size() > 8) return std::nullopt;
  uint32_t v = 0;
  for (char c : tok) {
    int d = hex_value(c);
    if (d < 0) return std::nullopt;
    v = v * 16 + static_cast<uint32_t>(d);
  }
  return v;
}

// Uppercase, no separators: "00008B5DE43B".
inline std::string to_hex(std::string_view bytes) {
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char b : bytes) {
    out.push_back(kHexDigits[b >> 4]);
    out.push_back(kHexDigits[b & 0xF]);
  }
  return out;
}

inline std::optional<std::string> bytes_from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) return std::nullopt;
  std::string out;
  out.reserve(hex.size() / 2);
  for (size_t i = 0; i + 1 < hex.size(); i += 2) {
    int hi = hex_value(hex[i]);
    int lo = hex_value(hex[i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out.push_back(static_cast<char>(hi * 16 + lo));
  }
  return out;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

inline std::string format_address(uint32_t addr) {
  char buf[9];
  for (int i = 7; i >= 0; --i) {
    buf[i] = kHexDigits[addr & 0xF];
    addr >>= 4;
  }
  buf[8] = '\0';
  return std::string(buf);
}

}  // namespace gramsight
