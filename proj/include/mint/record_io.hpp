#pragma once

#include <string>
#include <string_view>

#include "mint/span.hpp"

namespace mint {

// One ingest line: a span record, an explicit end-of-trace control record
// ({"end": "<trace_id>", "agent_id": "..."}), or garbage.
struct ParsedRecord {
  enum class Type { SpanRecord, EndOfTrace, Bad };
  Type type = Type::Bad;
  Span span;
  std::string end_trace_id;
  std::string end_agent_id;
  RecordError error = RecordError::None;
};

ParsedRecord parse_record(std::string_view line);

// Canonical one-line rendering. Field order is fixed, numbers use the
// shortest round-trip form, parent_span_id is omitted for roots. The
// generator and the reconstruction path share this writer, which is what
// makes byte-level fixture diffs meaningful.
std::string render_record(const Span& s);
std::string render_end_marker(std::string_view trace_id, std::string_view agent_id);

std::string json_escape(std::string_view s);
std::string format_double(double d);

}  // namespace mint
