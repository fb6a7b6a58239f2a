#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mint/params_buffer.hpp"
#include "mint/record_io.hpp"
#include "mint/samplers.hpp"
#include "mint/span_parser.hpp"
#include "mint/subtrace.hpp"
#include "mint/topo_library.hpp"

namespace mint {

struct AgentConfig {
  ParserConfig parser;
  size_t params_capacity_bytes = 4u << 20;
  size_t bloom_capacity_bytes = 4096;
  double bloom_fpp = 0.01;
  uint64_t idle_gap = 1000;   // records without news before a trace self-closes
  uint64_t head_seed = 1;     // shared by all agents so head marks agree
  double head_rate = 0.0;
  bool parallel_warmup = true;
};

// Everything one trace closure produced; the caller routes it onward.
struct FinalizeInfo {
  std::string trace_id;
  std::string topo_id;
  uint64_t topo_match_count = 0;  // frequency inputs for the rarity sampler
  uint64_t topo_total = 0;
  bool new_topo = false;
  std::optional<BloomRecord> sealed;
  ParamBlock block;  // retained copy for sampler inspection
  // Marked before closing (head mark or an earlier broadcast): the block
  // bypassed the buffer and should be emitted now.
  bool emitted_direct = false;
  std::vector<std::string> evicted;  // traces whose buffered data this push displaced
};

struct MarkResult {
  bool relevant = false;  // agent ever held spans of this trace
  bool partial = false;   // some of its data was already evicted
  std::vector<ParamBlock> blocks;
};

// One ingestion node: warms its parser on the first spans it sees, then
// parses online, groups per-trace params, derives topology on trace close,
// and keeps unsampled params in a bounded buffer for retroactive marks.
class Agent {
 public:
  Agent(std::string id, AgentConfig cfg);

  // Feeds one record; closures triggered by it (end marker, idle sweep,
  // warmup replay) are appended to out.
  void ingest(const ParsedRecord& rec, std::vector<FinalizeInfo>& out);

  // End of stream: runs warmup on whatever was buffered if it never
  // triggered, then closes every open trace.
  void finish(std::vector<FinalizeInfo>& out);

  // A sampling mark for the trace (broadcast or local). Marks are sticky:
  // later spans of the trace emit directly on close.
  MarkResult on_mark(const std::string& trace_id);

  bool is_marked(const std::string& trace_id) const { return marked_.count(trace_id) > 0; }

  const std::string& id() const { return id_; }
  PatternPool& pool() { return pool_; }
  const PatternPool& pool() const { return pool_; }
  SpanParser& parser() { return parser_; }
  const TopoLibrary& topo() const { return topo_; }
  bool warmed() const { return parser_.warmed(); }

  uint64_t records_seen() const { return records_seen_; }
  uint64_t spans_seen() const { return spans_seen_; }
  uint64_t open_trace_count() const { return open_.size(); }
  uint64_t evicted_block_count() const { return evicted_block_count_; }
  uint64_t malformed_count() const { return malformed_count_; }
  size_t buffer_bytes() const { return buffer_.current_bytes(); }

 private:
  struct OpenTrace {
    std::vector<SpanParams> params;
    uint64_t first_seen = 0;
    uint64_t last_seen = 0;
  };

  void handle(const ParsedRecord& rec, uint64_t at, std::vector<FinalizeInfo>& out);
  void handle_span(const Span& s, uint64_t at);
  void run_warmup(std::vector<FinalizeInfo>& out);
  void idle_sweep(std::vector<FinalizeInfo>& out);
  FinalizeInfo finalize(const std::string& trace_id);

  std::string id_;
  AgentConfig cfg_;
  PatternPool pool_;
  SpanParser parser_;
  TopoLibrary topo_;
  ParamsBuffer buffer_;

  // Pre-warmup intake: records wait here (with their arrival clocks) until
  // the sample is big enough, then replay in order.
  std::vector<std::pair<ParsedRecord, uint64_t>> prewarm_;
  size_t prewarm_spans_ = 0;

  std::unordered_map<std::string, OpenTrace> open_;
  std::unordered_set<std::string> marked_;
  std::unordered_set<std::string> evicted_traces_;

  uint64_t clock_ = 0;
  uint64_t records_seen_ = 0;
  uint64_t spans_seen_ = 0;
  uint64_t evicted_block_count_ = 0;
  uint64_t malformed_count_ = 0;
};

}  // namespace mint
