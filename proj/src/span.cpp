#include "mint/span.hpp"

#include <algorithm>

namespace mint {

RecordError validate_span(const Span& s) {
  if (s.trace_id.empty() || s.span_id.empty() || s.agent_id.empty() || s.operation.empty())
    return RecordError::MalformedRecord;
  if (!s.parent_span_id.empty() && s.parent_span_id == s.span_id)
    return RecordError::MalformedRecord;
  for (const auto& [key, value] : s.metadata) {
    (void)value;
    if (std::find(kMetadataKeys.begin(), kMetadataKeys.end(), key) == kMetadataKeys.end())
      return RecordError::MalformedRecord;
  }
  for (size_t i = 0; i < s.metadata.size(); ++i)
    for (size_t j = i + 1; j < s.metadata.size(); ++j)
      if (s.metadata[i].first == s.metadata[j].first) return RecordError::MalformedRecord;
  for (size_t i = 0; i < s.attributes.size(); ++i)
    for (size_t j = i + 1; j < s.attributes.size(); ++j)
      if (s.attributes[i].first == s.attributes[j].first) return RecordError::DuplicateAttributeKey;
  return RecordError::None;
}

const char* record_error_name(RecordError e) {
  switch (e) {
    case RecordError::None: return "none";
    case RecordError::MalformedRecord: return "malformed_record";
    case RecordError::DuplicateAttributeKey: return "duplicate_attribute_key";
  }
  return "unknown";
}

}  // namespace mint
