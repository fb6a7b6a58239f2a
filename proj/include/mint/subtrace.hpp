#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mint/span.hpp"

namespace mint {

// Sentinel parent ids used in topology encodings. A true root (span with no
// parent at all) hangs under kRootSentinel; a span whose parent lives on
// another agent hangs under kExternalSentinel. Keeping the two apart makes
// "entry from an external caller" part of the pattern identity.
inline constexpr const char* kRootSentinel = "!root";
inline constexpr const char* kExternalSentinel = "!ext";

struct SubTraceSpan {
  std::string span_id;
  std::string parent_span_id;
  std::string span_pattern_id;
  std::string operation;
};

struct EntrySignature {
  std::string operation;
  std::string span_pattern_id;
  bool true_root = false;  // parent absent, as opposed to merely off-node

  bool operator==(const EntrySignature& o) const {
    return operation == o.operation && span_pattern_id == o.span_pattern_id &&
           true_root == o.true_root;
  }
};

struct ExitSignature {
  std::string operation;
  std::string span_pattern_id;

  bool operator==(const ExitSignature& o) const {
    return operation == o.operation && span_pattern_id == o.span_pattern_id;
  }
};

// One trace's spans on one agent, linked into a forest.
struct SubTrace {
  std::string trace_id;
  std::string agent_id;
  std::vector<SubTraceSpan> spans;
  std::vector<size_t> roots;          // indices into spans
  std::vector<char> external_parent;  // per root: parent exists but off-node
  std::vector<EntrySignature> entries;
  std::vector<ExitSignature> exits;  // local leaves, sorted, deduplicated
};

enum class SubTraceError { None, EmptyInput, CyclicParentLinks };

// Links spans of one (trace, agent) pair by parent ids. Roots are spans whose
// parent is absent or not among the given span ids; exits are spans with no
// local children.
std::optional<SubTrace> assemble_subtrace(const std::string& trace_id,
                                          const std::string& agent_id,
                                          const std::vector<const Span*>& spans,
                                          const std::vector<std::string>& span_pattern_ids,
                                          SubTraceError* error = nullptr);

// Same linking for callers that kept only the parsed identities.
std::optional<SubTrace> assemble_subtrace(const std::string& trace_id,
                                          const std::string& agent_id,
                                          std::vector<SubTraceSpan> spans,
                                          SubTraceError* error = nullptr);

// Canonical topology encoding: edges aggregated by parent pattern id, children
// as sorted multisets, roots attached under the sentinels. Depends only on
// pattern ids and structure, so any span listing order and any trace's ids
// produce the same bytes for the same shape.
std::string encode_topology(const SubTrace& st);

}  // namespace mint
