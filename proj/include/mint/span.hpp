#pragma once

#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mint {

struct AttributeValue {
  enum class Kind { String, Number };
  Kind kind = Kind::String;
  std::string str;
  double num = 0.0;

  static AttributeValue string(std::string s) {
    AttributeValue v;
    v.kind = Kind::String;
    v.str = std::move(s);
    return v;
  }
  static AttributeValue number(double d) {
    AttributeValue v;
    v.kind = Kind::Number;
    v.num = d;
    return v;
  }
  bool operator==(const AttributeValue& o) const {
    if (kind != o.kind) return false;
    return kind == Kind::String ? str == o.str : num == o.num;
  }
};

// Metadata carries the bookkeeping fields that are never pattern-parsed.
inline constexpr std::array<std::string_view, 4> kMetadataKeys = {
    "service", "start_ns", "duration_ns", "status_code"};

struct Span {
  std::string trace_id;
  std::string span_id;
  std::string parent_span_id;  // empty: root of the whole trace
  std::string agent_id;
  std::string operation;
  std::vector<std::pair<std::string, std::string>> metadata;        // ordered
  std::vector<std::pair<std::string, AttributeValue>> attributes;   // ordered
};

enum class RecordError {
  None,
  MalformedRecord,
  DuplicateAttributeKey,
};

// Structural checks only; pattern-level concerns live in the parser.
// parent_span_id == span_id is malformed, metadata keys must come from the
// predefined set, attribute and metadata keys must be unique.
RecordError validate_span(const Span& s);

const char* record_error_name(RecordError e);

}  // namespace mint
