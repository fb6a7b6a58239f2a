#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mint {

// Sizing for a fixed bit-array budget: given the byte budget and a target
// false-positive probability, the capacity n (insertions before sealing) and
// hash count k come from the standard optimum n = floor(-m*(ln2)^2 / ln p),
// k = round((m/n)*ln2).
struct BloomParams {
  size_t bits = 0;      // m
  size_t capacity = 0;  // n, seal threshold
  uint32_t hashes = 0;  // k
  double fpp = 0.0;

  static BloomParams derive(size_t capacity_bytes, double fpp);
};

class BloomFilter {
 public:
  BloomFilter() = default;
  explicit BloomFilter(BloomParams params);

  void insert(std::string_view key);
  bool test(std::string_view key) const;
  bool full() const { return inserted_ >= params_.capacity; }
  uint64_t inserted() const { return inserted_; }
  const BloomParams& params() const { return params_; }
  const std::vector<uint8_t>& bytes() const { return bits_; }

  std::string bits_base64() const;
  static std::optional<BloomFilter> from_base64(std::string_view b64, uint32_t hashes,
                                                uint64_t inserted, double fpp);

 private:
  BloomParams params_;
  std::vector<uint8_t> bits_;
  uint64_t inserted_ = 0;
};

// Sealed (or snapshotted) filter as it travels to the backend and sits in the
// store. seq numbers filters per (agent, topo) in seal order; a non-final
// record is a point-in-time copy of the live filter and is superseded by the
// next record with the same (agent_id, topo_id, seq).
struct BloomRecord {
  std::string topo_id;
  std::string agent_id;
  uint64_t seq = 0;
  bool final = false;
  BloomFilter filter;
};

std::string bloom_record_to_json(const BloomRecord& r);
std::optional<BloomRecord> bloom_record_from_json(std::string_view line, double fpp);

std::string base64_encode(const uint8_t* data, size_t len);
std::optional<std::vector<uint8_t>> base64_decode(std::string_view b64);

}  // namespace mint
