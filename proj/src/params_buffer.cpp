#include "mint/params_buffer.hpp"

#include "mint/wire.hpp"

namespace mint {

namespace {

void encode_span_params(std::string& out, const SpanParams& sp) {
  wire::put_str(out, sp.span_id);
  wire::put_str(out, sp.parent_span_id);
  wire::put_str(out, sp.pattern_id);
  wire::put_u32(out, static_cast<uint32_t>(sp.metadata.size()));
  for (const auto& [k, v] : sp.metadata) {
    wire::put_str(out, k);
    wire::put_str(out, v);
  }
  wire::put_u32(out, static_cast<uint32_t>(sp.params.size()));
  for (const ParamValue& pv : sp.params) {
    wire::put_u8(out, static_cast<uint8_t>(pv.kind));
    switch (pv.kind) {
      case ParamValue::Kind::Fill:
        wire::put_str(out, pv.fill);
        break;
      case ParamValue::Kind::Residual:
      case ParamValue::Kind::RawNumber:
        wire::put_f64(out, pv.num);
        break;
      case ParamValue::Kind::Zero:
        break;
    }
  }
  wire::put_u32(out, static_cast<uint32_t>(sp.layouts.size()));
  for (const LayoutOverride& lo : sp.layouts) {
    wire::put_u32(out, lo.attr_index);
    wire::put_u32(out, static_cast<uint32_t>(lo.gaps.size()));
    for (const std::string& g : lo.gaps) wire::put_str(out, g);
  }
}

bool decode_span_params(wire::Reader& r, SpanParams& sp) {
  sp.span_id = r.str();
  sp.parent_span_id = r.str();
  sp.pattern_id = r.str();
  const uint32_t n_meta = r.u32();
  for (uint32_t i = 0; i < n_meta && r.ok; ++i) {
    std::string k = r.str();
    std::string v = r.str();
    sp.metadata.emplace_back(std::move(k), std::move(v));
  }
  const uint32_t n_params = r.u32();
  for (uint32_t i = 0; i < n_params && r.ok; ++i) {
    ParamValue pv;
    pv.kind = static_cast<ParamValue::Kind>(r.u8());
    switch (pv.kind) {
      case ParamValue::Kind::Fill:
        pv.fill = r.str();
        break;
      case ParamValue::Kind::Residual:
      case ParamValue::Kind::RawNumber:
        pv.num = r.f64();
        break;
      case ParamValue::Kind::Zero:
        break;
      default:
        r.ok = false;
        break;
    }
    sp.params.push_back(std::move(pv));
  }
  const uint32_t n_layouts = r.u32();
  for (uint32_t i = 0; i < n_layouts && r.ok; ++i) {
    LayoutOverride lo;
    lo.attr_index = r.u32();
    const uint32_t n_gaps = r.u32();
    for (uint32_t g = 0; g < n_gaps && r.ok; ++g) lo.gaps.push_back(r.str());
    sp.layouts.push_back(std::move(lo));
  }
  return r.ok;
}

}  // namespace

std::string encode_param_block(const ParamBlock& b) {
  std::string out;
  wire::put_str(out, b.trace_id);
  wire::put_str(out, b.agent_id);
  wire::put_u64(out, b.created_at);
  wire::put_u32(out, static_cast<uint32_t>(b.spans.size()));
  for (const SpanParams& sp : b.spans) encode_span_params(out, sp);
  return out;
}

std::optional<ParamBlock> decode_param_block(std::string_view wire_bytes) {
  wire::Reader r{wire_bytes, 0, true};
  ParamBlock b;
  b.trace_id = r.str();
  b.agent_id = r.str();
  b.created_at = r.u64();
  const uint32_t n = r.u32();
  for (uint32_t i = 0; i < n && r.ok; ++i) {
    SpanParams sp;
    if (!decode_span_params(r, sp)) break;
    b.spans.push_back(std::move(sp));
  }
  if (!r.done()) return std::nullopt;
  b.wire = std::string(wire_bytes);
  return b;
}

ParamBlock ParamBlock::make(std::string trace_id, std::string agent_id, uint64_t created_at,
                            std::vector<SpanParams> spans) {
  ParamBlock b;
  b.trace_id = std::move(trace_id);
  b.agent_id = std::move(agent_id);
  b.created_at = created_at;
  b.spans = std::move(spans);
  b.wire = encode_param_block(b);
  return b;
}

ParamsBuffer::PushError ParamsBuffer::push(ParamBlock block, std::vector<ParamBlock>* evicted) {
  if (block.byte_size() > capacity_) return PushError::BlockTooLarge;
  bytes_ += block.byte_size();
  queue_.push_back(std::move(block));
  while (bytes_ > capacity_) {
    bytes_ -= queue_.front().byte_size();
    if (evicted) evicted->push_back(std::move(queue_.front()));
    queue_.pop_front();
  }
  return PushError::None;
}

std::vector<ParamBlock> ParamsBuffer::take(const std::string& trace_id) {
  std::vector<ParamBlock> out;
  std::deque<ParamBlock> rest;
  for (ParamBlock& b : queue_) {
    if (b.trace_id == trace_id) {
      bytes_ -= b.byte_size();
      out.push_back(std::move(b));
    } else {
      rest.push_back(std::move(b));
    }
  }
  queue_ = std::move(rest);
  return out;
}

}  // namespace mint
