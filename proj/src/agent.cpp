#include "mint/agent.hpp"

#include <algorithm>

namespace mint {

namespace {
// Idle traces are swept on a fixed clock grid so closure timing depends only
// on the record sequence, not on call batching.
constexpr uint64_t kSweepInterval = 64;
}  // namespace

Agent::Agent(std::string id, AgentConfig cfg)
    : id_(std::move(id)),
      cfg_(cfg),
      parser_(cfg.parser, &pool_),
      topo_(id_, cfg.bloom_capacity_bytes, cfg.bloom_fpp),
      buffer_(cfg.params_capacity_bytes) {}

void Agent::ingest(const ParsedRecord& rec, std::vector<FinalizeInfo>& out) {
  ++clock_;
  ++records_seen_;
  if (rec.type == ParsedRecord::Type::Bad) {
    ++malformed_count_;
    return;
  }
  if (!parser_.warmed()) {
    prewarm_.emplace_back(rec, clock_);
    if (rec.type == ParsedRecord::Type::SpanRecord) ++prewarm_spans_;
    if (prewarm_spans_ >= cfg_.parser.warmup_sample_size) run_warmup(out);
    return;
  }
  handle(rec, clock_, out);
  if (clock_ % kSweepInterval == 0) idle_sweep(out);
}

void Agent::handle(const ParsedRecord& rec, uint64_t at, std::vector<FinalizeInfo>& out) {
  if (rec.type == ParsedRecord::Type::SpanRecord) {
    handle_span(rec.span, at);
    return;
  }
  // End-of-trace marker: close if the trace is open here; markers for traces
  // this agent never hosted are routine and ignored.
  if (open_.count(rec.end_trace_id)) out.push_back(finalize(rec.end_trace_id));
}

void Agent::handle_span(const Span& s, uint64_t at) {
  SpanParams sp = parser_.parse(s);
  ++spans_seen_;
  auto [it, inserted] = open_.try_emplace(s.trace_id);
  if (inserted) it->second.first_seen = at;
  it->second.last_seen = at;
  it->second.params.push_back(std::move(sp));
}

void Agent::run_warmup(std::vector<FinalizeInfo>& out) {
  std::vector<const Span*> sample;
  sample.reserve(prewarm_spans_);
  for (const auto& [rec, at] : prewarm_)
    if (rec.type == ParsedRecord::Type::SpanRecord) sample.push_back(&rec.span);
  parser_.warm(sample, cfg_.parallel_warmup);
  // Replay in arrival order with the original clocks: groups, counts, and
  // closures land exactly as if the parser had been warm from the start.
  std::vector<std::pair<ParsedRecord, uint64_t>> replay;
  replay.swap(prewarm_);
  prewarm_spans_ = 0;
  for (const auto& [rec, at] : replay) handle(rec, at, out);
}

void Agent::idle_sweep(std::vector<FinalizeInfo>& out) {
  std::vector<std::pair<uint64_t, std::string>> stale;
  for (const auto& [tid, g] : open_)
    if (g.last_seen + cfg_.idle_gap <= clock_) stale.emplace_back(g.first_seen, tid);
  std::sort(stale.begin(), stale.end());
  for (const auto& [_, tid] : stale) out.push_back(finalize(tid));
}

void Agent::finish(std::vector<FinalizeInfo>& out) {
  if (!parser_.warmed()) run_warmup(out);
  std::vector<std::pair<uint64_t, std::string>> remaining;
  for (const auto& [tid, g] : open_) remaining.emplace_back(g.first_seen, tid);
  std::sort(remaining.begin(), remaining.end());
  for (const auto& [_, tid] : remaining) out.push_back(finalize(tid));
}

FinalizeInfo Agent::finalize(const std::string& trace_id) {
  FinalizeInfo info;
  info.trace_id = trace_id;
  auto node = open_.extract(trace_id);
  OpenTrace& g = node.mapped();

  std::vector<SubTraceSpan> sts;
  sts.reserve(g.params.size());
  for (const SpanParams& sp : g.params) {
    const SpanPattern* pat = pool_.find_span(sp.pattern_id);
    sts.push_back({sp.span_id, sp.parent_span_id, sp.pattern_id,
                   pat ? pat->operation : std::string()});
  }
  SubTraceError err = SubTraceError::None;
  if (auto st = assemble_subtrace(trace_id, id_, std::move(sts), &err)) {
    TopoLibrary::ProcessResult pr = topo_.process(*st);
    info.topo_id = pr.pattern->id;
    info.topo_match_count = pr.pattern->match_count;
    info.topo_total = topo_.total_matches();
    info.new_topo = pr.inserted;
    info.sealed = std::move(pr.sealed);
  } else {
    ++malformed_count_;
  }

  info.block = ParamBlock::make(trace_id, id_, clock_, std::move(g.params));
  if (marked_.count(trace_id) || head_sampled(cfg_.head_seed, trace_id, cfg_.head_rate)) {
    marked_.insert(trace_id);
    info.emitted_direct = true;
  } else {
    std::vector<ParamBlock> victims;
    const ParamsBuffer::PushError pe = buffer_.push(info.block, &victims);
    if (pe == ParamsBuffer::PushError::BlockTooLarge) {
      // A block that cannot fit at all is lost the moment it exists.
      evicted_traces_.insert(trace_id);
      ++evicted_block_count_;
    }
    for (ParamBlock& v : victims) {
      evicted_traces_.insert(v.trace_id);
      ++evicted_block_count_;
    }
  }
  return info;
}

MarkResult Agent::on_mark(const std::string& trace_id) {
  MarkResult mr;
  const bool known = marked_.count(trace_id) > 0 || open_.count(trace_id) > 0 ||
                     evicted_traces_.count(trace_id) > 0;
  marked_.insert(trace_id);
  mr.blocks = buffer_.take(trace_id);
  mr.partial = evicted_traces_.count(trace_id) > 0;
  mr.relevant = known || !mr.blocks.empty();
  return mr;
}

}  // namespace mint
