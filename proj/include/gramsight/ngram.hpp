#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "gramsight/hex.hpp"

namespace gramsight {

// A fixed-length sequence of raw bytes. Canonical text form is uppercase hex
// with no separators, e.g. "00008B5DE43B" for n=6.
struct NGram {
  std::string bytes;

  NGram() = default;
  explicit NGram(std::string raw) : bytes(std::move(raw)) {}

  size_t size() const { return bytes.size(); }
  std::string hex() const { return to_hex(bytes); }

  static NGram from_hex(std::string_view hex) {
    auto raw = bytes_from_hex(hex);
    if (!raw) throw std::invalid_argument("NGram::from_hex: bad hex string: " + std::string(hex));
    return NGram(std::move(*raw));
  }

  auto operator<=>(const NGram&) const = default;
};

struct NGramHash {
  size_t operator()(const NGram& g) const {
    return std::hash<std::string>()(g.bytes);
  }
};

// 64-bit mix used for shard routing; must be stable across runs.
inline uint64_t mix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline uint64_t hash_bytes64(std::string_view s) {
  uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return mix64(h);
}

}  // namespace gramsight
