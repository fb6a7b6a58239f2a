#include "mint/subtrace.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace mint {

std::optional<SubTrace> assemble_subtrace(const std::string& trace_id,
                                          const std::string& agent_id,
                                          const std::vector<const Span*>& spans,
                                          const std::vector<std::string>& span_pattern_ids,
                                          SubTraceError* error) {
  if (spans.size() != span_pattern_ids.size()) {
    if (error) *error = SubTraceError::EmptyInput;
    return std::nullopt;
  }
  std::vector<SubTraceSpan> sts;
  sts.reserve(spans.size());
  for (size_t i = 0; i < spans.size(); ++i) {
    const Span& s = *spans[i];
    sts.push_back({s.span_id, s.parent_span_id, span_pattern_ids[i], s.operation});
  }
  return assemble_subtrace(trace_id, agent_id, std::move(sts), error);
}

std::optional<SubTrace> assemble_subtrace(const std::string& trace_id,
                                          const std::string& agent_id,
                                          std::vector<SubTraceSpan> spans,
                                          SubTraceError* error) {
  auto fail = [&](SubTraceError e) -> std::optional<SubTrace> {
    if (error) *error = e;
    return std::nullopt;
  };
  if (spans.empty()) return fail(SubTraceError::EmptyInput);

  SubTrace st;
  st.trace_id = trace_id;
  st.agent_id = agent_id;
  st.spans = std::move(spans);

  std::unordered_map<std::string, size_t> by_id;
  for (size_t i = 0; i < st.spans.size(); ++i) by_id.emplace(st.spans[i].span_id, i);

  std::vector<char> has_child(st.spans.size(), 0);
  for (size_t i = 0; i < st.spans.size(); ++i) {
    const SubTraceSpan& s = st.spans[i];
    if (s.parent_span_id.empty()) {
      st.roots.push_back(i);
      st.external_parent.push_back(0);
      continue;
    }
    auto it = by_id.find(s.parent_span_id);
    if (it == by_id.end()) {
      st.roots.push_back(i);
      st.external_parent.push_back(1);
    } else {
      if (it->second == i) return fail(SubTraceError::CyclicParentLinks);
      has_child[it->second] = 1;
    }
  }

  // Walk each parent chain once; a chain longer than the span count can only
  // mean the links loop back on themselves.
  for (size_t i = 0; i < st.spans.size(); ++i) {
    size_t cur = i;
    for (size_t steps = 0; steps <= st.spans.size(); ++steps) {
      const std::string& parent = st.spans[cur].parent_span_id;
      if (parent.empty()) break;
      auto it = by_id.find(parent);
      if (it == by_id.end()) break;
      cur = it->second;
      if (cur == i) return fail(SubTraceError::CyclicParentLinks);
      if (steps == st.spans.size()) return fail(SubTraceError::CyclicParentLinks);
    }
  }

  for (size_t r = 0; r < st.roots.size(); ++r) {
    const SubTraceSpan& s = st.spans[st.roots[r]];
    st.entries.push_back({s.operation, s.span_pattern_id, st.external_parent[r] == 0});
  }
  std::sort(st.entries.begin(), st.entries.end(), [](const auto& a, const auto& b) {
    return std::tie(a.operation, a.span_pattern_id, a.true_root) <
           std::tie(b.operation, b.span_pattern_id, b.true_root);
  });
  st.entries.erase(std::unique(st.entries.begin(), st.entries.end()), st.entries.end());

  for (size_t i = 0; i < st.spans.size(); ++i) {
    if (has_child[i]) continue;
    st.exits.push_back({st.spans[i].operation, st.spans[i].span_pattern_id});
  }
  std::sort(st.exits.begin(), st.exits.end(), [](const auto& a, const auto& b) {
    return std::tie(a.operation, a.span_pattern_id) < std::tie(b.operation, b.span_pattern_id);
  });
  st.exits.erase(std::unique(st.exits.begin(), st.exits.end()), st.exits.end());

  if (error) *error = SubTraceError::None;
  return st;
}

std::string encode_topology(const SubTrace& st) {
  std::unordered_map<std::string, size_t> by_id;
  for (size_t i = 0; i < st.spans.size(); ++i) by_id.emplace(st.spans[i].span_id, i);

  // parent pattern (or sentinel) -> multiset of child patterns
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

  std::string out;
  for (auto& [parent, children] : edges) {
    std::sort(children.begin(), children.end());
    out += parent;
    out += ':';
    for (size_t i = 0; i < children.size(); ++i) {
      if (i) out += ',';
      out += children[i];
    }
    out += ';';
  }
  return out;
}

}  // namespace mint
