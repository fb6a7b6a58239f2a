#include "mint/bloom.hpp"

#include <array>
#include <cmath>

#include "json.hpp"

#include "mint/common.hpp"

namespace mint {

BloomParams BloomParams::derive(size_t capacity_bytes, double fpp) {
  BloomParams p;
  p.bits = capacity_bytes * 8;
  p.fpp = fpp;
  const double m = static_cast<double>(p.bits);
  const double ln2 = std::log(2.0);
  p.capacity = static_cast<size_t>(std::floor(-(m * ln2 * ln2) / std::log(fpp)));
  if (p.capacity == 0) p.capacity = 1;
  p.hashes = static_cast<uint32_t>(
      std::lround((m / static_cast<double>(p.capacity)) * ln2));
  if (p.hashes == 0) p.hashes = 1;
  return p;
}

BloomFilter::BloomFilter(BloomParams params)
    : params_(params), bits_((params.bits + 7) / 8, 0) {}

namespace {
// Double hashing: two independent 64-bit digests generate all k probe
// positions. The second is forced odd so the stride cycles the whole table.
inline void probe_seeds(std::string_view key, uint64_t& h1, uint64_t& h2) {
  h1 = fnv1a64(key);
  h2 = fnv1a64(key, 0x84222325cbf29ce4ull) | 1;
}
}  // namespace

void BloomFilter::insert(std::string_view key) {
  uint64_t h1 = 0, h2 = 0;
  probe_seeds(key, h1, h2);
  for (uint32_t i = 0; i < params_.hashes; ++i) {
    const uint64_t bit = (h1 + i * h2) % params_.bits;
    bits_[bit >> 3] |= static_cast<uint8_t>(1u << (bit & 7));
  }
  ++inserted_;
}

bool BloomFilter::test(std::string_view key) const {
  if (bits_.empty()) return false;
  uint64_t h1 = 0, h2 = 0;
  probe_seeds(key, h1, h2);
  for (uint32_t i = 0; i < params_.hashes; ++i) {
    const uint64_t bit = (h1 + i * h2) % params_.bits;
    if (!(bits_[bit >> 3] & (1u << (bit & 7)))) return false;
  }
  return true;
}

std::string BloomFilter::bits_base64() const { return base64_encode(bits_.data(), bits_.size()); }

std::optional<BloomFilter> BloomFilter::from_base64(std::string_view b64, uint32_t hashes,
                                                    uint64_t inserted, double fpp) {
  auto raw = base64_decode(b64);
  if (!raw || raw->empty() || hashes == 0) return std::nullopt;
  BloomParams params = BloomParams::derive(raw->size(), fpp);
  if (params.hashes != hashes) params.hashes = hashes;  // trust the record
  BloomFilter f(params);
  f.bits_ = std::move(*raw);
  f.inserted_ = inserted;
  return f;
}

std::string bloom_record_to_json(const BloomRecord& r) {
  nlohmann::ordered_json j;
  j["topo"] = r.topo_id;
  j["agent"] = r.agent_id;
  j["seq"] = r.seq;
  j["k"] = r.filter.params().hashes;
  j["inserted"] = r.filter.inserted();
  j["final"] = r.final;
  j["bits"] = r.filter.bits_base64();
  return j.dump();
}

std::optional<BloomRecord> bloom_record_from_json(std::string_view line, double fpp) {
  nlohmann::ordered_json j = nlohmann::ordered_json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  for (const char* field : {"topo", "agent", "bits"})
    if (!j.contains(field) || !j[field].is_string()) return std::nullopt;
  for (const char* field : {"seq", "k", "inserted"})
    if (!j.contains(field) || !j[field].is_number_unsigned()) return std::nullopt;
  if (!j.contains("final") || !j["final"].is_boolean()) return std::nullopt;
  auto filter = BloomFilter::from_base64(j["bits"].get<std::string>(), j["k"].get<uint32_t>(),
                                         j["inserted"].get<uint64_t>(), fpp);
  if (!filter) return std::nullopt;
  BloomRecord r;
  r.topo_id = j["topo"].get<std::string>();
  r.agent_id = j["agent"].get<std::string>();
  r.seq = j["seq"].get<uint64_t>();
  r.final = j["final"].get<bool>();
  r.filter = std::move(*filter);
  return r;
}

namespace {
constexpr char kB64Alphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string base64_encode(const uint8_t* data, size_t len) {
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  size_t i = 0;
  for (; i + 3 <= len; i += 3) {
    const uint32_t v = (uint32_t(data[i]) << 16) | (uint32_t(data[i + 1]) << 8) | data[i + 2];
    out += kB64Alphabet[(v >> 18) & 63];
    out += kB64Alphabet[(v >> 12) & 63];
    out += kB64Alphabet[(v >> 6) & 63];
    out += kB64Alphabet[v & 63];
  }
  const size_t rest = len - i;
  if (rest == 1) {
    const uint32_t v = uint32_t(data[i]) << 16;
    out += kB64Alphabet[(v >> 18) & 63];
    out += kB64Alphabet[(v >> 12) & 63];
    out += "==";
  } else if (rest == 2) {
    const uint32_t v = (uint32_t(data[i]) << 16) | (uint32_t(data[i + 1]) << 8);
    out += kB64Alphabet[(v >> 18) & 63];
    out += kB64Alphabet[(v >> 12) & 63];
    out += kB64Alphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::optional<std::vector<uint8_t>> base64_decode(std::string_view b64) {
  if (b64.size() % 4 != 0) return std::nullopt;
  static const auto value_of = [] {
    std::array<int8_t, 256> t{};
    t.fill(-1);
    for (int i = 0; i < 64; ++i) t[static_cast<uint8_t>(kB64Alphabet[i])] = static_cast<int8_t>(i);
    return t;
  }();
  std::vector<uint8_t> out;
  out.reserve(b64.size() / 4 * 3);
  for (size_t i = 0; i < b64.size(); i += 4) {
    int pad = 0;
    uint32_t v = 0;
    for (int j = 0; j < 4; ++j) {
      const char c = b64[i + j];
      if (c == '=') {
        if (i + 4 != b64.size() || j < 2) return std::nullopt;
        ++pad;
        v <<= 6;
        continue;
      }
      if (pad) return std::nullopt;  // data after padding
      const int8_t d = value_of[static_cast<uint8_t>(c)];
      if (d < 0) return std::nullopt;
      v = (v << 6) | static_cast<uint32_t>(d);
    }
    out.push_back(static_cast<uint8_t>((v >> 16) & 0xff));
    if (pad < 2) out.push_back(static_cast<uint8_t>((v >> 8) & 0xff));
    if (pad < 1) out.push_back(static_cast<uint8_t>(v & 0xff));
  }
  return out;
}

}  // namespace mint
