#include "mint/collector.hpp"

#include "mint/wire.hpp"

namespace mint {

const char* envelope_kind_name(EnvelopeKind k) {
  switch (k) {
    case EnvelopeKind::PatternDelta:
      return "pattern_delta";
    case EnvelopeKind::SealedBloom:
      return "sealed_bloom";
    case EnvelopeKind::ParamEmission:
      return "param_emission";
  }
  return "unknown";
}

std::string ReportEnvelope::wire() const {
  std::string body;
  wire::put_u8(body, static_cast<uint8_t>(kind));
  wire::put_str(body, agent_id);
  wire::put_u64(body, tick);
  wire::put_str(body, payload);
  std::string out;
  wire::put_u32(out, static_cast<uint32_t>(body.size()));
  out += body;
  return out;
}

std::optional<ReportEnvelope> ReportEnvelope::from_wire(std::string_view bytes) {
  wire::Reader r{bytes, 0, true};
  const uint32_t len = r.u32();
  if (!r.need(len) || bytes.size() - r.pos != len) return std::nullopt;
  ReportEnvelope e;
  e.kind = static_cast<EnvelopeKind>(r.u8());
  if (e.kind != EnvelopeKind::PatternDelta && e.kind != EnvelopeKind::SealedBloom &&
      e.kind != EnvelopeKind::ParamEmission)
    return std::nullopt;
  e.agent_id = r.str();
  e.tick = r.u64();
  e.payload = r.str();
  if (!r.done()) return std::nullopt;
  return e;
}

std::string EmissionRecord::encode() const {
  std::string out;
  wire::put_str(out, trace_id);
  wire::put_str(out, agent_id);
  wire::put_u8(out, partial ? 1 : 0);
  wire::put_u32(out, static_cast<uint32_t>(block_wires.size()));
  for (const std::string& b : block_wires) wire::put_str(out, b);
  return out;
}

std::optional<EmissionRecord> EmissionRecord::decode(std::string_view bytes) {
  wire::Reader r{bytes, 0, true};
  EmissionRecord rec;
  rec.trace_id = r.str();
  rec.agent_id = r.str();
  rec.partial = r.u8() != 0;
  const uint32_t n = r.u32();
  for (uint32_t i = 0; i < n && r.ok; ++i) rec.block_wires.push_back(r.str());
  if (!r.done()) return std::nullopt;
  return rec;
}

Collector::Collector(std::string agent_id, bool full_resend)
    : agent_id_(std::move(agent_id)), full_resend_(full_resend) {}

ReportEnvelope Collector::meter(ReportEnvelope e) {
  const uint64_t bytes = e.wire().size();
  switch (e.kind) {
    case EnvelopeKind::PatternDelta:
      counters_.pattern_bytes += bytes;
      break;
    case EnvelopeKind::SealedBloom:
      counters_.bloom_bytes += bytes;
      break;
    case EnvelopeKind::ParamEmission:
      counters_.param_bytes += bytes;
      break;
  }
  ++counters_.envelopes;
  return e;
}

ReportEnvelope Collector::tick_report(uint64_t tick, const PatternPool& pool,
                                      const TopoLibrary& topo) {
  std::string payload;
  for (const SpanPattern* sp : pool.span_patterns()) {
    if (!full_resend_ && acked_spans_.count(sp->id)) continue;
    payload += span_pattern_to_json(*sp, pool);
    payload += '\n';
  }
  for (const TopoPattern* tp : topo.patterns()) {
    if (!full_resend_ && acked_topos_.count(tp->id)) continue;
    payload += topo_pattern_to_json(*tp);
    payload += '\n';
  }
  ReportEnvelope e;
  e.kind = EnvelopeKind::PatternDelta;
  e.agent_id = agent_id_;
  e.tick = tick;
  e.payload = std::move(payload);
  return meter(std::move(e));
}

std::vector<ReportEnvelope> Collector::bloom_snapshots(uint64_t tick, const TopoLibrary& topo) {
  std::vector<ReportEnvelope> out;
  for (const BloomRecord& r : topo.live_snapshots()) {
    ReportEnvelope e;
    e.kind = EnvelopeKind::SealedBloom;
    e.agent_id = agent_id_;
    e.tick = tick;
    e.payload = bloom_record_to_json(r);
    out.push_back(meter(std::move(e)));
  }
  return out;
}

ReportEnvelope Collector::sealed_bloom(uint64_t tick, const BloomRecord& record) {
  ReportEnvelope e;
  e.kind = EnvelopeKind::SealedBloom;
  e.agent_id = agent_id_;
  e.tick = tick;
  e.payload = bloom_record_to_json(record);
  return meter(std::move(e));
}

std::optional<ReportEnvelope> Collector::emit_params(uint64_t tick, const std::string& trace_id,
                                                     const std::vector<ParamBlock>& blocks,
                                                     bool partial, bool from_mark) {
  if (from_mark && !mark_emitted_.insert(trace_id).second) return std::nullopt;
  EmissionRecord rec;
  rec.trace_id = trace_id;
  rec.agent_id = agent_id_;
  rec.partial = partial;
  for (const ParamBlock& b : blocks) rec.block_wires.push_back(b.wire);
  ReportEnvelope e;
  e.kind = EnvelopeKind::ParamEmission;
  e.agent_id = agent_id_;
  e.tick = tick;
  e.payload = rec.encode();
  return meter(std::move(e));
}

void Collector::acknowledge_spans(const std::vector<std::string>& ids) {
  for (const std::string& id : ids) acked_spans_.insert(id);
}

void Collector::acknowledge_topos(const std::vector<std::string>& ids) {
  for (const std::string& id : ids) acked_topos_.insert(id);
}

}  // namespace mint
