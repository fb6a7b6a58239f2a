#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mint/bloom.hpp"
#include "mint/collector.hpp"
#include "mint/params_buffer.hpp"
#include "mint/span_parser.hpp"
#include "mint/topo_library.hpp"

namespace mint {

// Work a single query performed, for the no-scan property: answering must
// cost bloom probes and dictionary lookups, not a walk over the corpus.
struct QueryCost {
  uint64_t bloom_probes = 0;
  uint64_t dict_lookups = 0;

  uint64_t total() const { return bloom_probes + dict_lookups; }
};

// One (topology pattern, agent) pair whose stored filters claim the trace.
struct TraceSegment {
  std::string topo_id;
  std::string agent_id;
  uint64_t positive_records = 0;  // stored filters that tested positive
  bool has_params = false;        // param store holds this agent's blocks
  bool low_confidence = false;    // suspected bloom false positive
  bool pattern_known = false;     // dictionary entry arrived
};

// One span-pattern occurrence in the stitched approximate topology.
struct ApproxNode {
  std::string span_pattern_id;
  std::string operation;
  std::string agent_id;
  bool low_confidence = false;
  std::vector<std::string> attr_lines;  // "key = template", values masked
  std::vector<size_t> children;         // indices into ApproximateTrace::nodes
};

struct ApproximateTrace {
  std::string trace_id;
  std::vector<TraceSegment> segments;
  std::vector<ApproxNode> nodes;
  std::vector<size_t> roots;  // node indices
  bool fragmented = false;
  std::vector<Span> exact_spans;  // sub-parts whose params are stored

  std::string render() const;
};

struct ExactTrace {
  std::string trace_id;
  std::vector<Span> spans;

  std::vector<std::string> render_lines() const;
};

struct TraceQueryResult {
  enum class Kind { Miss, Approximate, Exact };
  Kind kind = Kind::Miss;
  ExactTrace exact;
  ApproximateTrace approx;  // filled for Approximate; kept for Exact context
  QueryCost cost;
};

const char* query_kind_name(TraceQueryResult::Kind k);

// Pattern ids the backend confirmed from a delta; routed back to the
// collector so later deltas shrink.
struct StoreAck {
  std::vector<std::string> span_pattern_ids;
  std::vector<std::string> topo_pattern_ids;
};

enum class ReconstructStatus { Ok, IncompleteParams };

struct ReconstructOutcome {
  ReconstructStatus status = ReconstructStatus::Ok;
  std::vector<Span> spans;
  std::vector<std::string> missing_agents;  // agents whose params are absent
  std::string message;
};

// Storage engine + querier. Ingestion (apply) is serialized by the caller;
// queries are read-only against the store as of the call.
class TraceStore {
 public:
  explicit TraceStore(double bloom_fpp = 0.01);

  // Routes one envelope into the store. Idempotent for pattern deltas and
  // sealed filters; live filter snapshots supersede older snapshots with the
  // same (agent, topo, seq).
  StoreAck apply(const ReportEnvelope& e);

  TraceQueryResult query(const std::string& trace_id) const;

  // Exact reconstruction of a sampled trace from its stored blocks; reports
  // the agents whose params are missing instead of guessing.
  ReconstructOutcome reconstruct_exact(const std::string& trace_id,
                                       const std::vector<std::string>& required_agents,
                                       QueryCost* cost) const;

  // Batch-analysis listings.
  std::vector<std::string> sampled_traces() const;
  std::vector<std::string> sampled_traces_for_topo(const std::string& topo_id) const;
  std::vector<std::string> sampled_traces_in_window(uint64_t min_created,
                                                    uint64_t max_created) const;

  const NetCounters& received() const { return received_; }
  const PatternPool& patterns() const { return pool_; }
  const TopoPattern* find_topo(const std::string& id) const;
  std::vector<const TopoPattern*> topo_patterns() const;

  size_t span_pattern_count() const { return pool_.span_patterns().size(); }
  size_t string_pattern_count() const { return pool_.string_patterns().size(); }
  size_t topo_pattern_count() const { return topo_order_.size(); }
  size_t bloom_record_count() const;
  size_t param_block_count() const;
  size_t sampled_count() const { return sampled_order_.size(); }

  // Serialized footprint by category, byte-identical to what save() writes.
  uint64_t stored_pattern_bytes() const;
  uint64_t stored_bloom_bytes() const;
  uint64_t stored_param_bytes() const;
  uint64_t stored_total_bytes() const {
    return stored_pattern_bytes() + stored_bloom_bytes() + stored_param_bytes();
  }

  void set_raw_bytes(uint64_t n) { raw_bytes_ = n; }
  uint64_t raw_bytes() const { return raw_bytes_; }

  bool save(const std::string& dir, std::string* error = nullptr) const;
  bool load(const std::string& dir, std::string* error = nullptr);

 private:
  struct TopoEntry {
    std::optional<TopoPattern> pattern;  // may trail its first sealed filter
    std::vector<BloomRecord> records;    // arrival order, snapshots upserted
  };
  struct SampledInfo {
    bool partial = false;
    std::vector<std::string> agents;  // emission sources, first-seen order
  };
  struct ParamEntry {
    std::vector<ParamBlock> blocks;  // arrival order
  };

  void apply_pattern_delta(const ReportEnvelope& e, StoreAck& ack);
  void apply_bloom(const ReportEnvelope& e);
  void apply_emission(const ReportEnvelope& e);
  void upsert_bloom(BloomRecord r);
  void note_sampled(const std::string& trace_id, const std::string& agent_id, bool partial);
  bool insert_block(ParamBlock b);

  std::vector<TraceSegment> probe_segments(const std::string& trace_id, QueryCost& cost) const;
  void demote_false_positives(std::vector<TraceSegment>& segments,
                              const std::string& trace_id) const;
  ApproximateTrace stitch(const std::string& trace_id, std::vector<TraceSegment> segments,
                          QueryCost& cost) const;

  double bloom_fpp_;
  PatternPool pool_;
  std::unordered_map<std::string, TopoEntry> topos_;
  std::vector<std::string> topo_order_;
  std::unordered_map<std::string, ParamEntry> params_;
  std::unordered_map<std::string, SampledInfo> sampled_;
  std::vector<std::string> sampled_order_;
  NetCounters received_;
  uint64_t raw_bytes_ = 0;
};

}  // namespace mint
