#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mint/bloom.hpp"
#include "mint/subtrace.hpp"

namespace mint {

struct TopoPattern {
  std::string id;
  // parent pattern id (or sentinel) -> sorted multiset of child pattern ids,
  // sorted by parent. This is exactly what the canonical encoding serializes.
  std::vector<std::pair<std::string, std::vector<std::string>>> edges;
  std::vector<EntrySignature> entries;
  std::vector<ExitSignature> exits;
  uint64_t match_count = 0;
};

std::string topo_pattern_to_json(const TopoPattern& tp);
std::optional<TopoPattern> topo_pattern_from_json(std::string_view line);

// Per-agent topology pattern library with one live metadata filter per
// pattern. Exact-match on the canonical encoding; a hit mounts the trace id
// on the pattern's filter, a miss first inserts the pattern.
class TopoLibrary {
 public:
  TopoLibrary(std::string agent_id, size_t bloom_capacity_bytes, double bloom_fpp);

  struct ProcessResult {
    const TopoPattern* pattern = nullptr;
    bool inserted = false;                  // pattern was new
    std::optional<BloomRecord> sealed;      // set when this mount filled the filter
  };
  ProcessResult process(const SubTrace& st);

  const TopoPattern* find(const std::string& topo_id) const;
  const std::vector<const TopoPattern*>& patterns() const { return order_; }
  uint64_t total_matches() const { return total_matches_; }
  const BloomParams& bloom_params() const { return bloom_params_; }

  // Point-in-time copies of every live filter with at least one insertion,
  // for the periodic report; supersede by (agent, topo, seq) on the far side.
  std::vector<BloomRecord> live_snapshots() const;

 private:
  struct Mounted {
    BloomFilter live;
    uint64_t next_seq = 0;
  };

  std::string agent_id_;
  BloomParams bloom_params_;
  std::unordered_map<std::string, TopoPattern> patterns_by_id_;
  std::vector<const TopoPattern*> order_;
  std::unordered_map<std::string, std::string> id_by_encoding_;
  std::unordered_map<std::string, Mounted> blooms_;
  uint64_t total_matches_ = 0;
};

// Builds the stored pattern from a sub-trace: aggregated edges in canonical
// order plus the entry/exit signatures. The id is the content id of the
// canonical encoding, so equal shapes get equal ids on every agent.
TopoPattern make_topo_pattern(const SubTrace& st);

}  // namespace mint
