#include "mint/topo_library.hpp"

#include <algorithm>
#include <map>

#include "json.hpp"

#include "mint/common.hpp"

namespace mint {

namespace {
using ojson = nlohmann::ordered_json;
}

TopoPattern make_topo_pattern(const SubTrace& st) {
  TopoPattern tp;
  std::unordered_map<std::string, size_t> by_id;
  for (size_t i = 0; i < st.spans.size(); ++i) by_id.emplace(st.spans[i].span_id, i);

  std::map<std::string, std::vector<std::string>> edges;
  for (const SubTraceSpan& s : st.spans) {
    std::string parent_pattern;
    if (s.parent_span_id.empty()) {
      parent_pattern = kRootSentinel;
    } else {
      auto it = by_id.find(s.parent_span_id);
      parent_pattern = it == by_id.end() ? kExternalSentinel : st.spans[it->second].span_pattern_id;
    }
    edges[parent_pattern].push_back(s.span_pattern_id);
  }
  for (auto& [parent, children] : edges) {
    std::sort(children.begin(), children.end());
    tp.edges.emplace_back(parent, std::move(children));
  }
  tp.entries = st.entries;
  tp.exits = st.exits;
  tp.id = content_id(encode_topology(st));
  tp.match_count = 0;
  return tp;
}

std::string topo_pattern_to_json(const TopoPattern& tp) {
  ojson j;
  j["topo"] = tp.id;
  j["match_count"] = tp.match_count;
  ojson edges = ojson::array();
  for (const auto& [parent, children] : tp.edges)
    edges.push_back(ojson::array({parent, children}));
  j["edges"] = std::move(edges);
  ojson entries = ojson::array();
  for (const EntrySignature& e : tp.entries)
    entries.push_back(ojson::array({e.operation, e.span_pattern_id, e.true_root}));
  j["entries"] = std::move(entries);
  ojson exits = ojson::array();
  for (const ExitSignature& e : tp.exits)
    exits.push_back(ojson::array({e.operation, e.span_pattern_id}));
  j["exits"] = std::move(exits);
  return j.dump();
}

std::optional<TopoPattern> topo_pattern_from_json(std::string_view line) {
  ojson j = ojson::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  if (!j.contains("topo") || !j["topo"].is_string()) return std::nullopt;
  if (!j.contains("edges") || !j["edges"].is_array()) return std::nullopt;
  if (!j.contains("entries") || !j["entries"].is_array()) return std::nullopt;
  if (!j.contains("exits") || !j["exits"].is_array()) return std::nullopt;

  TopoPattern tp;
  tp.id = j["topo"].get<std::string>();
  if (j.contains("match_count") && j["match_count"].is_number_unsigned())
    tp.match_count = j["match_count"].get<uint64_t>();
  for (const auto& e : j["edges"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_array())
      return std::nullopt;
    std::vector<std::string> children;
    for (const auto& c : e[1]) {
      if (!c.is_string()) return std::nullopt;
      children.push_back(c.get<std::string>());
    }
    tp.edges.emplace_back(e[0].get<std::string>(), std::move(children));
  }
  for (const auto& e : j["entries"]) {
    if (!e.is_array() || e.size() != 3 || !e[0].is_string() || !e[1].is_string() ||
        !e[2].is_boolean())
      return std::nullopt;
    tp.entries.push_back({e[0].get<std::string>(), e[1].get<std::string>(), e[2].get<bool>()});
  }
  for (const auto& e : j["exits"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
      return std::nullopt;
    tp.exits.push_back({e[0].get<std::string>(), e[1].get<std::string>()});
  }
  return tp;
}

TopoLibrary::TopoLibrary(std::string agent_id, size_t bloom_capacity_bytes, double bloom_fpp)
    : agent_id_(std::move(agent_id)),
      bloom_params_(BloomParams::derive(bloom_capacity_bytes, bloom_fpp)) {}

TopoLibrary::ProcessResult TopoLibrary::process(const SubTrace& st) {
  ProcessResult res;
  const std::string encoding = encode_topology(st);
  auto enc_it = id_by_encoding_.find(encoding);
  TopoPattern* tp = nullptr;
  if (enc_it == id_by_encoding_.end()) {
    TopoPattern fresh = make_topo_pattern(st);
    auto [pos, ok] = patterns_by_id_.emplace(fresh.id, std::move(fresh));
    (void)ok;
    tp = &pos->second;
    order_.push_back(tp);
    id_by_encoding_.emplace(encoding, tp->id);
    blooms_.emplace(tp->id, Mounted{BloomFilter(bloom_params_), 0});
    res.inserted = true;
  } else {
    tp = &patterns_by_id_.find(enc_it->second)->second;
  }
  ++tp->match_count;
  ++total_matches_;
  res.pattern = tp;

  Mounted& m = blooms_.find(tp->id)->second;
  m.live.insert(st.trace_id);
  if (m.live.full()) {
    BloomRecord sealed;
    sealed.topo_id = tp->id;
    sealed.agent_id = agent_id_;
    sealed.seq = m.next_seq++;
    sealed.final = true;
    sealed.filter = std::move(m.live);
    res.sealed = std::move(sealed);
    m.live = BloomFilter(bloom_params_);
  }
  return res;
}

const TopoPattern* TopoLibrary::find(const std::string& topo_id) const {
  auto it = patterns_by_id_.find(topo_id);
  return it == patterns_by_id_.end() ? nullptr : &it->second;
}

std::vector<BloomRecord> TopoLibrary::live_snapshots() const {
  std::vector<BloomRecord> out;
  for (const TopoPattern* tp : order_) {
    auto it = blooms_.find(tp->id);
    if (it == blooms_.end() || it->second.live.inserted() == 0) continue;
    BloomRecord r;
    r.topo_id = tp->id;
    r.agent_id = agent_id_;
    r.seq = it->second.next_seq;  // slot the next seal will claim
    r.final = false;
    r.filter = it->second.live;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace mint
