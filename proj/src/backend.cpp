#include "mint/backend.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "json.hpp"
#include "mint/record_io.hpp"
#include "mint/wire.hpp"

namespace mint {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kPatternsHeader = "#mint-patterns-v1";
constexpr const char* kTopoHeader = "#mint-topo-v1";
constexpr const char* kSampledHeader = "#mint-sampled-v1";
constexpr const char* kParamsMagic = "MINTPRM1";
constexpr size_t kMaxRenderDepth = 64;

std::string short_id(const std::string& id) { return id.size() > 8 ? id.substr(0, 8) : id; }

bool read_file(const fs::path& p, std::string& out) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return false;
  out.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  return true;
}

bool write_file(const fs::path& p, const std::string& content, std::string* error) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) {
    if (error) *error = "cannot open " + p.string() + " for writing";
    return false;
  }
  out << content;
  out.flush();
  if (!out) {
    if (error) *error = "write failed for " + p.string();
    return false;
  }
  return true;
}

// Splits into lines, dropping a trailing empty line; keeps interior order.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (start < text.size()) {
    size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    out.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// Pattern ids named by a topology pattern's edges (sentinels excluded).
std::set<std::string> topo_node_set(const TopoPattern& tp) {
  std::set<std::string> nodes;
  for (const auto& [parent, children] : tp.edges) {
    if (parent != kRootSentinel && parent != kExternalSentinel) nodes.insert(parent);
    for (const std::string& c : children) nodes.insert(c);
  }
  return nodes;
}

bool entry_seeks_parent(const TopoPattern& tp) {
  for (const EntrySignature& e : tp.entries)
    if (!e.true_root) return true;
  return false;
}

}  // namespace

const char* query_kind_name(TraceQueryResult::Kind k) {
  switch (k) {
    case TraceQueryResult::Kind::Miss:
      return "miss";
    case TraceQueryResult::Kind::Approximate:
      return "approximate";
    case TraceQueryResult::Kind::Exact:
      return "exact";
  }
  return "unknown";
}

std::vector<std::string> ExactTrace::render_lines() const {
  std::vector<std::string> out;
  out.reserve(spans.size());
  for (const Span& s : spans) out.push_back(render_record(s));
  return out;
}

std::string ApproximateTrace::render() const {
  std::string out = "approximate trace " + trace_id + "\n";
  out += "fragmented: ";
  out += fragmented ? "yes" : "no";
  out += "\n";
  for (const TraceSegment& seg : segments) {
    out += "segment " + short_id(seg.topo_id) + " on " + seg.agent_id;
    out += " filters=" + std::to_string(seg.positive_records);
    out += seg.has_params ? " params=yes" : " params=no";
    out += seg.low_confidence ? " confidence=low" : " confidence=high";
    if (!seg.pattern_known) out += " pattern=unknown";
    out += "\n";
  }
  struct Frame {
    size_t node;
    size_t depth;
  };
  std::vector<Frame> stack;
  for (size_t r = roots.size(); r > 0; --r) stack.push_back({roots[r - 1], 0});
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    const ApproxNode& n = nodes[f.node];
    std::string indent(2 * f.depth, ' ');
    out += indent + "[" + n.agent_id + "] " + (n.operation.empty() ? "?" : n.operation);
    out += "  (pattern " + short_id(n.span_pattern_id) + ")";
    if (n.low_confidence) out += "  [low confidence]";
    out += "\n";
    for (const std::string& line : n.attr_lines) out += indent + "    " + line + "\n";
    for (size_t c = n.children.size(); c > 0; --c)
      stack.push_back({n.children[c - 1], f.depth + 1});
  }
  if (!exact_spans.empty()) {
    out += "exact spans stored: " + std::to_string(exact_spans.size()) + "\n";
    for (const Span& s : exact_spans) out += "  " + render_record(s) + "\n";
  }
  return out;
}

TraceStore::TraceStore(double bloom_fpp) : bloom_fpp_(bloom_fpp) {}

StoreAck TraceStore::apply(const ReportEnvelope& e) {
  StoreAck ack;
  const uint64_t bytes = e.wire().size();
  switch (e.kind) {
    case EnvelopeKind::PatternDelta:
      received_.pattern_bytes += bytes;
      apply_pattern_delta(e, ack);
      break;
    case EnvelopeKind::SealedBloom:
      received_.bloom_bytes += bytes;
      apply_bloom(e);
      break;
    case EnvelopeKind::ParamEmission:
      received_.param_bytes += bytes;
      apply_emission(e);
      break;
  }
  ++received_.envelopes;
  return ack;
}

void TraceStore::apply_pattern_delta(const ReportEnvelope& e, StoreAck& ack) {
  for (std::string_view line : split_lines(e.payload)) {
    if (line.empty()) continue;
    ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) continue;
    if (j.contains("topo")) {
      std::optional<TopoPattern> tp = topo_pattern_from_json(line);
      if (!tp) continue;
      auto it = topos_.find(tp->id);
      if (it == topos_.end()) {
        TopoEntry entry;
        entry.pattern = std::move(*tp);
        topo_order_.push_back(entry.pattern->id);
        ack.topo_pattern_ids.push_back(entry.pattern->id);
        topos_.emplace(ack.topo_pattern_ids.back(), std::move(entry));
      } else {
        if (!it->second.pattern) {
          it->second.pattern = std::move(*tp);
        } else {
          it->second.pattern->match_count =
              std::max(it->second.pattern->match_count, tp->match_count);
        }
        ack.topo_pattern_ids.push_back(it->first);
      }
    } else if (j.contains("pattern")) {
      const SpanPattern* sp = span_pattern_from_json(line, pool_);
      if (sp) ack.span_pattern_ids.push_back(sp->id);
    }
  }
}

void TraceStore::apply_bloom(const ReportEnvelope& e) {
  std::optional<BloomRecord> r = bloom_record_from_json(e.payload, bloom_fpp_);
  if (r) upsert_bloom(std::move(*r));
}

void TraceStore::upsert_bloom(BloomRecord r) {
  auto it = topos_.find(r.topo_id);
  if (it == topos_.end()) {
    topo_order_.push_back(r.topo_id);
    it = topos_.emplace(r.topo_id, TopoEntry{}).first;
  }
  std::vector<BloomRecord>& records = it->second.records;
  for (BloomRecord& existing : records) {
    if (existing.agent_id != r.agent_id || existing.seq != r.seq) continue;
    if (existing.final) return;  // sealed wins; re-delivery is a no-op
    existing = std::move(r);     // newer snapshot, or the seal of this slot
    return;
  }
  records.push_back(std::move(r));
}

void TraceStore::note_sampled(const std::string& trace_id, const std::string& agent_id,
                              bool partial) {
  auto it = sampled_.find(trace_id);
  if (it == sampled_.end()) {
    it = sampled_.emplace(trace_id, SampledInfo{}).first;
    sampled_order_.push_back(trace_id);
  }
  SampledInfo& info = it->second;
  info.partial = info.partial || partial;
  if (std::find(info.agents.begin(), info.agents.end(), agent_id) == info.agents.end())
    info.agents.push_back(agent_id);
}

bool TraceStore::insert_block(ParamBlock b) {
  ParamEntry& entry = params_[b.trace_id];
  for (const ParamBlock& existing : entry.blocks)
    if (existing.agent_id == b.agent_id && existing.created_at == b.created_at) return false;
  entry.blocks.push_back(std::move(b));
  return true;
}

void TraceStore::apply_emission(const ReportEnvelope& e) {
  std::optional<EmissionRecord> rec = EmissionRecord::decode(e.payload);
  if (!rec) return;
  note_sampled(rec->trace_id, rec->agent_id, rec->partial);
  for (const std::string& w : rec->block_wires) {
    std::optional<ParamBlock> b = decode_param_block(w);
    if (b && b->trace_id == rec->trace_id) insert_block(std::move(*b));
  }
}

std::vector<TraceSegment> TraceStore::probe_segments(const std::string& trace_id,
                                                     QueryCost& cost) const {
  std::vector<TraceSegment> out;
  for (const std::string& tid : topo_order_) {
    const TopoEntry& entry = topos_.at(tid);
    std::map<std::string, uint64_t> positives;
    for (const BloomRecord& r : entry.records) {
      ++cost.bloom_probes;
      if (r.filter.test(trace_id)) ++positives[r.agent_id];
    }
    for (const auto& [agent, count] : positives) {
      TraceSegment seg;
      seg.topo_id = tid;
      seg.agent_id = agent;
      seg.positive_records = count;
      seg.pattern_known = entry.pattern.has_value();
      out.push_back(std::move(seg));
    }
  }
  std::sort(out.begin(), out.end(), [](const TraceSegment& a, const TraceSegment& b) {
    if (a.topo_id != b.topo_id) return a.topo_id < b.topo_id;
    return a.agent_id < b.agent_id;
  });
  auto pit = params_.find(trace_id);
  if (pit != params_.end()) {
    std::set<std::string> have;
    for (const ParamBlock& b : pit->second.blocks) have.insert(b.agent_id);
    for (TraceSegment& seg : out) seg.has_params = have.count(seg.agent_id) > 0;
  }
  return out;
}

void TraceStore::demote_false_positives(std::vector<TraceSegment>& segments,
                                        const std::string& trace_id) const {
  if (segments.size() < 2) return;
  std::vector<const TopoPattern*> pats(segments.size(), nullptr);
  for (size_t i = 0; i < segments.size(); ++i) {
    auto it = topos_.find(segments[i].topo_id);
    if (it != topos_.end() && it->second.pattern) pats[i] = &*it->second.pattern;
  }
  auto chained = [&](size_t i) {
    if (!pats[i]) return false;
    for (size_t j = 0; j < segments.size(); ++j) {
      if (j == i || !pats[j]) continue;
      for (const ExitSignature& ex : pats[j]->exits)
        for (const EntrySignature& en : pats[i]->entries)
          if (!en.true_root && ex.operation == en.operation) return true;
      for (const ExitSignature& ex : pats[i]->exits)
        for (const EntrySignature& en : pats[j]->entries)
          if (!en.true_root && ex.operation == en.operation) return true;
    }
    return false;
  };
  auto corroborated = [&](size_t i) {
    if (!pats[i]) return false;
    auto pit = params_.find(trace_id);
    if (pit == params_.end()) return false;
    std::set<std::string> nodes = topo_node_set(*pats[i]);
    for (const ParamBlock& b : pit->second.blocks) {
      if (b.agent_id != segments[i].agent_id) continue;
      for (const SpanParams& sp : b.spans)
        if (nodes.count(sp.pattern_id)) return true;
    }
    return false;
  };
  for (size_t i = 0; i < segments.size(); ++i) {
    if (segments[i].positive_records > 1) continue;
    if (chained(i)) continue;
    if (corroborated(i)) continue;
    segments[i].low_confidence = true;
  }
}

ApproximateTrace TraceStore::stitch(const std::string& trace_id,
                                    std::vector<TraceSegment> segments, QueryCost& cost) const {
  ApproximateTrace out;
  out.trace_id = trace_id;
  const size_t n = segments.size();
  std::vector<const TopoPattern*> pats(n, nullptr);
  for (size_t i = 0; i < n; ++i) {
    auto it = topos_.find(segments[i].topo_id);
    if (it != topos_.end() && it->second.pattern) pats[i] = &*it->second.pattern;
  }

  // Segment-level attachment: a segment whose entry has an off-node parent
  // hangs under the first segment (in sorted order) with a matching exit
  // operation; attachments never form cycles.
  std::vector<ptrdiff_t> parent(n, -1);
  std::vector<std::string> via_exit(n);
  for (size_t i = 0; i < n; ++i) {
    if (!pats[i] || !entry_seeks_parent(*pats[i])) continue;
    for (size_t j = 0; j < n && parent[i] < 0; ++j) {
      if (j == i || !pats[j]) continue;
      const ExitSignature* match = nullptr;
      for (const ExitSignature& ex : pats[j]->exits) {
        for (const EntrySignature& en : pats[i]->entries) {
          if (!en.true_root && ex.operation == en.operation) {
            match = &ex;
            break;
          }
        }
        if (match) break;
      }
      if (!match) continue;
      bool cycle = false;
      for (ptrdiff_t w = static_cast<ptrdiff_t>(j); w >= 0; w = parent[w]) {
        if (w == static_cast<ptrdiff_t>(i)) {
          cycle = true;
          break;
        }
      }
      if (cycle) continue;
      parent[i] = static_cast<ptrdiff_t>(j);
      via_exit[i] = match->span_pattern_id;
    }
  }

  size_t confident_roots = 0;
  bool unresolved = false;
  for (size_t i = 0; i < n; ++i) {
    if (parent[i] >= 0) continue;
    if (segments[i].low_confidence) continue;
    ++confident_roots;
    if (pats[i] && entry_seeks_parent(*pats[i])) unresolved = true;
  }
  out.fragmented = confident_roots > 1 || unresolved;

  // Per-segment node trees, expanded from the pattern edges.
  auto render_attrs = [&](const SpanPattern& sp) {
    std::vector<std::string> lines;
    for (const auto& [key, ap] : sp.attrs) {
      std::string v;
      switch (ap.kind) {
        case AttrPattern::Kind::String: {
          ++cost.dict_lookups;
          const StringPattern* st = pool_.find_string(ap.string_pattern_id);
          v = st ? st->rendered() : "<?>";
          break;
        }
        case AttrPattern::Kind::Bucket:
          v = format_interval(ap.bucket, sp.alpha);
          break;
        case AttrPattern::Kind::Negative:
          v = "(-inf, 0)";
          break;
        case AttrPattern::Kind::Zero:
          v = "0";
          break;
      }
      lines.push_back(key + " = " + v);
    }
    return lines;
  };

  std::vector<std::vector<size_t>> seg_roots(n);
  std::vector<std::vector<size_t>> seg_nodes(n);
  for (size_t i = 0; i < n; ++i) {
    if (!pats[i]) continue;
    std::map<std::string, const std::vector<std::string>*> children_of;
    std::vector<const std::vector<std::string>*> root_lists;
    for (const auto& [p, kids] : pats[i]->edges) {
      if (p == kRootSentinel || p == kExternalSentinel)
        root_lists.push_back(&kids);
      else
        children_of[p] = &kids;
    }
    std::vector<std::string> path;
    auto add_node = [&](auto&& self, const std::string& pid) -> size_t {
      ApproxNode node;
      node.span_pattern_id = pid;
      node.agent_id = segments[i].agent_id;
      node.low_confidence = segments[i].low_confidence;
      ++cost.dict_lookups;
      if (const SpanPattern* sp = pool_.find_span(pid)) {
        node.operation = sp->operation;
        node.attr_lines = render_attrs(*sp);
      }
      const size_t idx = out.nodes.size();
      out.nodes.push_back(std::move(node));
      seg_nodes[i].push_back(idx);
      auto cit = children_of.find(pid);
      if (cit != children_of.end() && path.size() < kMaxRenderDepth) {
        path.push_back(pid);
        for (const std::string& c : *cit->second) {
          if (std::find(path.begin(), path.end(), c) != path.end()) continue;
          const size_t child_idx = self(self, c);
          out.nodes[idx].children.push_back(child_idx);
        }
        path.pop_back();
      }
      return idx;
    };
    for (const std::vector<std::string>* kids : root_lists)
      for (const std::string& c : *kids) seg_roots[i].push_back(add_node(add_node, c));
  }

  // Cross-segment wiring: child segment roots become children of the parent
  // segment's matching exit node.
  for (size_t i = 0; i < n; ++i) {
    if (parent[i] < 0) continue;
    const size_t j = static_cast<size_t>(parent[i]);
    size_t attach = SIZE_MAX;
    for (size_t idx : seg_nodes[j]) {
      if (out.nodes[idx].span_pattern_id == via_exit[i]) {
        attach = idx;
        break;
      }
    }
    if (attach == SIZE_MAX) {
      parent[i] = -1;  // defensive: segment stays a root
      continue;
    }
    for (size_t r : seg_roots[i]) out.nodes[attach].children.push_back(r);
  }
  for (size_t i = 0; i < n; ++i)
    if (parent[i] < 0)
      for (size_t r : seg_roots[i]) out.roots.push_back(r);

  out.segments = std::move(segments);
  return out;
}

ReconstructOutcome TraceStore::reconstruct_exact(const std::string& trace_id,
                                                 const std::vector<std::string>& required_agents,
                                                 QueryCost* cost) const {
  ReconstructOutcome out;
  auto pit = params_.find(trace_id);
  std::set<std::string> have;
  if (pit != params_.end())
    for (const ParamBlock& b : pit->second.blocks) have.insert(b.agent_id);
  for (const std::string& a : required_agents)
    if (!have.count(a)) out.missing_agents.push_back(a);
  if (!out.missing_agents.empty()) {
    out.status = ReconstructStatus::IncompleteParams;
    out.message = "missing parameter blocks from agent(s): " + join(out.missing_agents, ", ");
    return out;
  }
  if (pit == params_.end()) return out;  // zero blocks, zero required: empty trace
  for (const ParamBlock& b : pit->second.blocks) {
    for (const SpanParams& sp : b.spans) {
      if (cost) cost->dict_lookups += 2;  // span pattern + its templates
      std::optional<Span> s = reconstruct_span(sp, trace_id, b.agent_id, pool_);
      if (!s) {
        out.status = ReconstructStatus::IncompleteParams;
        out.missing_agents.push_back(b.agent_id);
        out.message = "dictionary entry missing for pattern " + sp.pattern_id + " (agent " +
                      b.agent_id + ")";
        return out;
      }
      out.spans.push_back(std::move(*s));
    }
  }
  return out;
}

TraceQueryResult TraceStore::query(const std::string& trace_id) const {
  TraceQueryResult res;
  QueryCost cost;
  std::vector<TraceSegment> segments = probe_segments(trace_id, cost);
  if (segments.empty()) {
    res.kind = TraceQueryResult::Kind::Miss;
    res.cost = cost;
    return res;
  }
  demote_false_positives(segments, trace_id);
  ApproximateTrace approx = stitch(trace_id, std::move(segments), cost);

  auto sit = sampled_.find(trace_id);
  bool exact_ok = false;
  if (sit != sampled_.end() && !sit->second.partial) {
    std::vector<std::string> required;
    for (const TraceSegment& seg : approx.segments) {
      if (seg.low_confidence) continue;
      if (std::find(required.begin(), required.end(), seg.agent_id) == required.end())
        required.push_back(seg.agent_id);
    }
    ReconstructOutcome rec = reconstruct_exact(trace_id, required, &cost);
    if (rec.status == ReconstructStatus::Ok && !rec.spans.empty()) {
      exact_ok = true;
      res.exact.trace_id = trace_id;
      res.exact.spans = std::move(rec.spans);
    }
  }
  if (!exact_ok) {
    // Partial emissions still reconstruct exactly for the agents present.
    auto pit = params_.find(trace_id);
    if (pit != params_.end()) {
      for (const ParamBlock& b : pit->second.blocks) {
        for (const SpanParams& sp : b.spans) {
          cost.dict_lookups += 2;
          std::optional<Span> s = reconstruct_span(sp, trace_id, b.agent_id, pool_);
          if (s) approx.exact_spans.push_back(std::move(*s));
        }
      }
    }
  }
  res.kind = exact_ok ? TraceQueryResult::Kind::Exact : TraceQueryResult::Kind::Approximate;
  res.approx = std::move(approx);
  res.cost = cost;
  return res;
}

std::vector<std::string> TraceStore::sampled_traces() const { return sampled_order_; }

std::vector<std::string> TraceStore::sampled_traces_for_topo(const std::string& topo_id) const {
  std::vector<std::string> out;
  auto it = topos_.find(topo_id);
  if (it == topos_.end()) return out;
  for (const std::string& tid : sampled_order_)
    for (const BloomRecord& r : it->second.records)
      if (r.filter.test(tid)) {
        out.push_back(tid);
        break;
      }
  return out;
}

std::vector<std::string> TraceStore::sampled_traces_in_window(uint64_t min_created,
                                                              uint64_t max_created) const {
  std::vector<std::string> out;
  for (const std::string& tid : sampled_order_) {
    auto pit = params_.find(tid);
    if (pit == params_.end()) continue;
    for (const ParamBlock& b : pit->second.blocks) {
      if (b.created_at >= min_created && b.created_at <= max_created) {
        out.push_back(tid);
        break;
      }
    }
  }
  return out;
}

const TopoPattern* TraceStore::find_topo(const std::string& id) const {
  auto it = topos_.find(id);
  if (it == topos_.end() || !it->second.pattern) return nullptr;
  return &*it->second.pattern;
}

std::vector<const TopoPattern*> TraceStore::topo_patterns() const {
  std::vector<const TopoPattern*> out;
  for (const std::string& tid : topo_order_)
    if (const TopoPattern* tp = find_topo(tid)) out.push_back(tp);
  return out;
}

size_t TraceStore::bloom_record_count() const {
  size_t n = 0;
  for (const auto& [_, entry] : topos_) n += entry.records.size();
  return n;
}

size_t TraceStore::param_block_count() const {
  size_t n = 0;
  for (const auto& [_, entry] : params_) n += entry.blocks.size();
  return n;
}

namespace {

std::string render_patterns_dict(const PatternPool& pool) {
  std::string out = kPatternsHeader;
  out += '\n';
  for (const SpanPattern* sp : pool.span_patterns()) {
    out += span_pattern_to_json(*sp, pool);
    out += '\n';
  }
  return out;
}

}  // namespace

uint64_t TraceStore::stored_pattern_bytes() const {
  uint64_t n = render_patterns_dict(pool_).size();
  std::string topo = kTopoHeader;
  topo += '\n';
  for (const TopoPattern* tp : topo_patterns()) {
    topo += topo_pattern_to_json(*tp);
    topo += '\n';
  }
  return n + topo.size();
}

uint64_t TraceStore::stored_bloom_bytes() const {
  uint64_t n = 0;
  for (const auto& [_, entry] : topos_)
    for (const BloomRecord& r : entry.records) n += bloom_record_to_json(r).size() + 1;
  return n;
}

uint64_t TraceStore::stored_param_bytes() const {
  uint64_t n = 8;  // magic
  for (const std::string& tid : sampled_order_) {
    auto pit = params_.find(tid);
    if (pit == params_.end()) continue;
    for (const ParamBlock& b : pit->second.blocks) n += 4 + b.wire.size();
  }
  std::string idx = kSampledHeader;
  idx += '\n';
  n += idx.size();
  for (const std::string& tid : sampled_order_) {
    const SampledInfo& info = sampled_.at(tid);
    ordered_json j;
    j["trace"] = tid;
    j["partial"] = info.partial;
    j["agents"] = info.agents;
    n += j.dump().size() + 1;
  }
  return n;
}

bool TraceStore::save(const std::string& dir, std::string* error) const {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    if (error) *error = "cannot create " + dir + ": " + ec.message();
    return false;
  }
  if (!write_file(fs::path(dir) / "patterns.dict", render_patterns_dict(pool_), error))
    return false;

  std::string topo = kTopoHeader;
  topo += '\n';
  for (const TopoPattern* tp : topo_patterns()) {
    topo += topo_pattern_to_json(*tp);
    topo += '\n';
  }
  if (!write_file(fs::path(dir) / "topo.dict", topo, error)) return false;

  const fs::path blooms = fs::path(dir) / "blooms";
  fs::remove_all(blooms, ec);
  for (const std::string& tid : topo_order_) {
    const TopoEntry& entry = topos_.at(tid);
    if (entry.records.empty()) continue;
    const fs::path tdir = blooms / tid;
    fs::create_directories(tdir, ec);
    if (ec) {
      if (error) *error = "cannot create " + tdir.string() + ": " + ec.message();
      return false;
    }
    for (size_t k = 0; k < entry.records.size(); ++k) {
      const std::string name = std::to_string(k) + ".bf";
      if (!write_file(tdir / name, bloom_record_to_json(entry.records[k]) + "\n", error))
        return false;
    }
  }

  std::string plog = kParamsMagic;
  for (const std::string& tid : sampled_order_) {
    auto pit = params_.find(tid);
    if (pit == params_.end()) continue;
    for (const ParamBlock& b : pit->second.blocks) {
      wire::put_u32(plog, static_cast<uint32_t>(b.wire.size()));
      plog += b.wire;
    }
  }
  if (!write_file(fs::path(dir) / "params.log", plog, error)) return false;

  std::string idx = kSampledHeader;
  idx += '\n';
  for (const std::string& tid : sampled_order_) {
    const SampledInfo& info = sampled_.at(tid);
    ordered_json j;
    j["trace"] = tid;
    j["partial"] = info.partial;
    j["agents"] = info.agents;
    idx += j.dump();
    idx += '\n';
  }
  if (!write_file(fs::path(dir) / "sampled.idx", idx, error)) return false;

  ordered_json meta;
  meta["version"] = 1;
  meta["raw_bytes"] = raw_bytes_;
  meta["received"] = {{"pattern_bytes", received_.pattern_bytes},
                      {"bloom_bytes", received_.bloom_bytes},
                      {"param_bytes", received_.param_bytes},
                      {"envelopes", received_.envelopes}};
  return write_file(fs::path(dir) / "meta.json", meta.dump(2) + "\n", error);
}

bool TraceStore::load(const std::string& dir, std::string* error) {
  auto fail = [&](const std::string& msg) {
    if (error) *error = msg;
    return false;
  };
  *this = TraceStore(bloom_fpp_);

  std::string text;
  if (!read_file(fs::path(dir) / "patterns.dict", text))
    return fail("cannot read patterns.dict in " + dir);
  {
    auto lines = split_lines(text);
    if (lines.empty() || lines[0] != kPatternsHeader)
      return fail("patterns.dict: unsupported version header");
    for (size_t i = 1; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      if (!span_pattern_from_json(lines[i], pool_))
        return fail("patterns.dict: bad line " + std::to_string(i + 1));
    }
  }

  if (!read_file(fs::path(dir) / "topo.dict", text)) return fail("cannot read topo.dict in " + dir);
  {
    auto lines = split_lines(text);
    if (lines.empty() || lines[0] != kTopoHeader) return fail("topo.dict: unsupported version header");
    for (size_t i = 1; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      std::optional<TopoPattern> tp = topo_pattern_from_json(lines[i]);
      if (!tp) return fail("topo.dict: bad line " + std::to_string(i + 1));
      TopoEntry entry;
      entry.pattern = std::move(*tp);
      const std::string id = entry.pattern->id;
      topo_order_.push_back(id);
      topos_.emplace(id, std::move(entry));
    }
  }

  const fs::path blooms = fs::path(dir) / "blooms";
  if (fs::exists(blooms)) {
    std::vector<std::string> tids;
    for (const auto& de : fs::directory_iterator(blooms))
      if (de.is_directory()) tids.push_back(de.path().filename().string());
    std::sort(tids.begin(), tids.end());
    // Dictionary order first, then any filter-only directories.
    std::vector<std::string> ordered;
    for (const std::string& tid : topo_order_)
      if (std::find(tids.begin(), tids.end(), tid) != tids.end()) ordered.push_back(tid);
    for (const std::string& tid : tids)
      if (std::find(ordered.begin(), ordered.end(), tid) == ordered.end())
        ordered.push_back(tid);
    for (const std::string& tid : ordered) {
      std::vector<std::pair<unsigned long, fs::path>> files;
      for (const auto& de : fs::directory_iterator(blooms / tid)) {
        if (!de.is_regular_file() || de.path().extension() != ".bf") continue;
        try {
          files.emplace_back(std::stoul(de.path().stem().string()), de.path());
        } catch (...) {
          return fail("blooms/" + tid + ": non-numeric filter name " +
                      de.path().filename().string());
        }
      }
      std::sort(files.begin(), files.end());
      for (const auto& [seq, p] : files) {
        if (!read_file(p, text)) return fail("cannot read " + p.string());
        while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
        std::optional<BloomRecord> r = bloom_record_from_json(text, bloom_fpp_);
        if (!r) return fail("bad filter record in " + p.string());
        if (r->topo_id != tid) return fail("filter record in wrong directory: " + p.string());
        upsert_bloom(std::move(*r));
      }
    }
  }

  if (!read_file(fs::path(dir) / "sampled.idx", text))
    return fail("cannot read sampled.idx in " + dir);
  {
    auto lines = split_lines(text);
    if (lines.empty() || lines[0] != kSampledHeader)
      return fail("sampled.idx: unsupported version header");
    for (size_t i = 1; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      ordered_json j = ordered_json::parse(lines[i], nullptr, false);
      if (j.is_discarded() || !j.contains("trace") || !j.contains("partial") ||
          !j.contains("agents"))
        return fail("sampled.idx: bad line " + std::to_string(i + 1));
      const std::string tid = j["trace"].get<std::string>();
      for (const auto& a : j["agents"]) note_sampled(tid, a.get<std::string>(), false);
      if (j["partial"].get<bool>()) sampled_[tid].partial = true;
    }
  }

  if (!read_file(fs::path(dir) / "params.log", text))
    return fail("cannot read params.log in " + dir);
  {
    if (text.size() < 8 || text.compare(0, 8, kParamsMagic) != 0)
      return fail("params.log: unsupported magic");
    wire::Reader r{text, 8, true};
    while (r.ok && !r.done()) {
      const std::string w = r.str();
      if (!r.ok) return fail("params.log: truncated block");
      std::optional<ParamBlock> b = decode_param_block(w);
      if (!b) return fail("params.log: undecodable block");
      insert_block(std::move(*b));
    }
  }

  if (read_file(fs::path(dir) / "meta.json", text)) {
    ordered_json meta = ordered_json::parse(text, nullptr, false);
    if (!meta.is_discarded()) {
      raw_bytes_ = meta.value("raw_bytes", uint64_t{0});
      if (meta.contains("received")) {
        const auto& rc = meta["received"];
        received_.pattern_bytes = rc.value("pattern_bytes", uint64_t{0});
        received_.bloom_bytes = rc.value("bloom_bytes", uint64_t{0});
        received_.param_bytes = rc.value("param_bytes", uint64_t{0});
        received_.envelopes = rc.value("envelopes", uint64_t{0});
      }
    }
  }
  return true;
}

}  // namespace mint
