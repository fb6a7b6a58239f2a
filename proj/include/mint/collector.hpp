#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "mint/bloom.hpp"
#include "mint/params_buffer.hpp"
#include "mint/span_parser.hpp"
#include "mint/topo_library.hpp"

namespace mint {

enum class EnvelopeKind : uint8_t { PatternDelta = 1, SealedBloom = 2, ParamEmission = 3 };

const char* envelope_kind_name(EnvelopeKind k);

// Unit of agent-to-backend traffic. wire() is the metered byte format:
// length-prefixed (kind byte, agent_id, tick, payload).
struct ReportEnvelope {
  EnvelopeKind kind = EnvelopeKind::PatternDelta;
  std::string agent_id;
  uint64_t tick = 0;
  std::string payload;

  std::string wire() const;
  static std::optional<ReportEnvelope> from_wire(std::string_view bytes);
};

// Payload of a ParamEmission envelope: every block one agent holds for one
// sampled trace, plus whether older blocks had already been evicted.
struct EmissionRecord {
  std::string trace_id;
  std::string agent_id;
  bool partial = false;
  std::vector<std::string> block_wires;

  std::string encode() const;
  static std::optional<EmissionRecord> decode(std::string_view bytes);
};

struct NetCounters {
  uint64_t pattern_bytes = 0;
  uint64_t bloom_bytes = 0;
  uint64_t param_bytes = 0;
  uint64_t envelopes = 0;

  uint64_t total() const { return pattern_bytes + bloom_bytes + param_bytes; }
};

// Per-agent reporting side: pattern deltas on ticks, sealed filters
// immediately, parameter emissions on sample marks. Counts every byte it
// hands to the channel.
class Collector {
 public:
  Collector(std::string agent_id, bool full_resend);

  // PatternDelta for the tick: all patterns (span and topo level) the backend
  // has not acknowledged; with full_resend, everything every time. An empty
  // delta is still an envelope, so the cadence is visible in the meter.
  ReportEnvelope tick_report(uint64_t tick, const PatternPool& pool, const TopoLibrary& topo);

  // Point-in-time copies of live metadata filters, sent with the tick report
  // so the backend's view includes traces mounted since the last seal.
  std::vector<ReportEnvelope> bloom_snapshots(uint64_t tick, const TopoLibrary& topo);

  ReportEnvelope sealed_bloom(uint64_t tick, const BloomRecord& record);

  // from_mark emissions are deduplicated per trace (a re-mark sends nothing);
  // direct emissions carry fresh blocks and always go out.
  std::optional<ReportEnvelope> emit_params(uint64_t tick, const std::string& trace_id,
                                            const std::vector<ParamBlock>& blocks, bool partial,
                                            bool from_mark);

  void acknowledge_spans(const std::vector<std::string>& ids);
  void acknowledge_topos(const std::vector<std::string>& ids);

  const NetCounters& counters() const { return counters_; }
  const std::string& agent_id() const { return agent_id_; }

 private:
  ReportEnvelope meter(ReportEnvelope e);

  std::string agent_id_;
  bool full_resend_;
  std::unordered_set<std::string> acked_spans_;
  std::unordered_set<std::string> acked_topos_;
  std::unordered_set<std::string> mark_emitted_;
  NetCounters counters_;
};

}  // namespace mint
