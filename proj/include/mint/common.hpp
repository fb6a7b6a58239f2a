#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace mint {

// FNV-1a over 64 bits with a caller-chosen offset basis. Stable across runs,
// platforms and compilers; std::hash is none of those.
inline uint64_t fnv1a64(std::string_view data, uint64_t basis = 0xcbf29ce484222325ull) {
  uint64_t h = basis;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::string hex16(uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

// Content id for patterns: identical content yields the identical id on every
// run, so dictionaries from different agents merge by id.
inline std::string content_id(std::string_view content) {
  uint64_t a = fnv1a64(content);
  uint64_t b = fnv1a64(content, 0x84222325cbf29ce4ull);
  return hex16(splitmix64(a) ^ b);
}

// One uniform draw in [0,1) from a counter; used where a decision must be a
// pure function of (seed, key) rather than of stream interleaving.
inline double hash_unit(uint64_t seed, std::string_view key) {
  uint64_t h = splitmix64(seed ^ fnv1a64(key));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace mint
