#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

namespace mint::wire {

// Little-endian primitives, explicit so serialized bytes do not inherit the
// host's byte order.

inline void put_u8(std::string& out, uint8_t v) { out += static_cast<char>(v); }

inline void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xff);
}

inline void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out += static_cast<char>((v >> (8 * i)) & 0xff);
}

inline void put_f64(std::string& out, double d) {
  uint64_t bits = 0;
  std::memcpy(&bits, &d, sizeof bits);
  put_u64(out, bits);
}

inline void put_str(std::string& out, std::string_view s) {
  put_u32(out, static_cast<uint32_t>(s.size()));
  out += s;
}

struct Reader {
  std::string_view data;
  size_t pos = 0;
  bool ok = true;

  bool need(size_t n) {
    if (!ok || data.size() - pos < n) ok = false;
    return ok;
  }
  bool done() const { return ok && pos == data.size(); }
  uint8_t u8() {
    if (!need(1)) return 0;
    return static_cast<uint8_t>(data[pos++]);
  }
  uint32_t u32() {
    if (!need(4)) return 0;
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(uint8_t(data[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }
  uint64_t u64() {
    if (!need(8)) return 0;
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(uint8_t(data[pos + i])) << (8 * i);
    pos += 8;
    return v;
  }
  double f64() {
    const uint64_t bits = u64();
    double d = 0.0;
    std::memcpy(&d, &bits, sizeof d);
    return d;
  }
  std::string str() {
    const uint32_t n = u32();
    if (!need(n)) return {};
    std::string s(data.substr(pos, n));
    pos += n;
    return s;
  }
};

}  // namespace mint::wire
