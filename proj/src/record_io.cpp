#include "mint/record_io.hpp"

#include <charconv>
#include <cstdio>

#include "json.hpp"

namespace mint {

std::string json_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 4);
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out;
}

std::string format_double(double d) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), d);
  return std::string(buf, res.ptr);
}

namespace {

void append_quoted(std::string& out, std::string_view key, std::string_view val) {
  out += '"';
  out += key;
  out += "\":\"";
  out += json_escape(val);
  out += '"';
}

}  // namespace

std::string render_record(const Span& s) {
  std::string out = "{";
  append_quoted(out, "trace_id", s.trace_id);
  out += ',';
  append_quoted(out, "span_id", s.span_id);
  if (!s.parent_span_id.empty()) {
    out += ',';
    append_quoted(out, "parent_span_id", s.parent_span_id);
  }
  out += ',';
  append_quoted(out, "agent_id", s.agent_id);
  out += ',';
  append_quoted(out, "operation", s.operation);
  out += ",\"metadata\":{";
  bool first = true;
  for (const auto& [k, v] : s.metadata) {
    if (!first) out += ',';
    first = false;
    append_quoted(out, json_escape(k), v);
  }
  out += "},\"attributes\":{";
  first = true;
  for (const auto& [k, v] : s.attributes) {
    if (!first) out += ',';
    first = false;
    if (v.kind == AttributeValue::Kind::String) {
      append_quoted(out, json_escape(k), v.str);
    } else {
      out += '"';
      out += json_escape(k);
      out += "\":";
      out += format_double(v.num);
    }
  }
  out += "}}";
  return out;
}

std::string render_end_marker(std::string_view trace_id, std::string_view agent_id) {
  std::string out = "{";
  append_quoted(out, "end", trace_id);
  out += ',';
  append_quoted(out, "agent_id", agent_id);
  out += '}';
  return out;
}

ParsedRecord parse_record(std::string_view line) {
  ParsedRecord rec;
  nlohmann::ordered_json j = nlohmann::ordered_json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    rec.error = RecordError::MalformedRecord;
    return rec;
  }
  if (j.contains("end")) {
    if (!j["end"].is_string()) {
      rec.error = RecordError::MalformedRecord;
      return rec;
    }
    rec.type = ParsedRecord::Type::EndOfTrace;
    rec.end_trace_id = j["end"].get<std::string>();
    if (j.contains("agent_id") && j["agent_id"].is_string())
      rec.end_agent_id = j["agent_id"].get<std::string>();
    return rec;
  }
  auto str_field = [&](const char* key, std::string& dst, bool required) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return !required;
    if (!it->is_string()) return false;
    dst = it->get<std::string>();
    return true;
  };
  bool ok = str_field("trace_id", rec.span.trace_id, true) &&
            str_field("span_id", rec.span.span_id, true) &&
            str_field("parent_span_id", rec.span.parent_span_id, false) &&
            str_field("agent_id", rec.span.agent_id, true) &&
            str_field("operation", rec.span.operation, true);
  if (ok && j.contains("metadata")) {
    const auto& md = j["metadata"];
    if (!md.is_object()) {
      ok = false;
    } else {
      for (auto it = md.begin(); it != md.end(); ++it) {
        if (!it.value().is_string()) {
          ok = false;
          break;
        }
        rec.span.metadata.emplace_back(it.key(), it.value().get<std::string>());
      }
    }
  }
  if (ok && j.contains("attributes")) {
    const auto& at = j["attributes"];
    if (!at.is_object()) {
      ok = false;
    } else {
      for (auto it = at.begin(); it != at.end(); ++it) {
        if (it.value().is_string()) {
          rec.span.attributes.emplace_back(it.key(),
                                           AttributeValue::string(it.value().get<std::string>()));
        } else if (it.value().is_number()) {
          rec.span.attributes.emplace_back(it.key(),
                                           AttributeValue::number(it.value().get<double>()));
        } else {
          ok = false;
          break;
        }
      }
    }
  }
  if (!ok) {
    rec.error = RecordError::MalformedRecord;
    return rec;
  }
  rec.type = ParsedRecord::Type::SpanRecord;
  rec.error = validate_span(rec.span);
  return rec;
}

}  // namespace mint
