#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mint/numeric_bucket.hpp"
#include "mint/prefix_tree.hpp"
#include "mint/span.hpp"
#include "mint/string_pattern.hpp"

namespace mint {

struct ParserConfig {
  double similarity_threshold = 0.8;
  double alpha = 0.5;
  size_t warmup_sample_size = 5000;
};

struct AttrPattern {
  enum class Kind : uint8_t { String, Bucket, Negative, Zero };
  Kind kind = Kind::String;
  std::string string_pattern_id;  // String only
  int32_t bucket = 0;             // Bucket only
};

// One combination of per-attribute patterns that appears together: the shared
// half of every span that parses to it. Identity covers the operation name,
// the ordered attribute patterns, and alpha (bucket bounds depend on it).
struct SpanPattern {
  std::string id;
  std::string operation;
  double alpha = 0.5;
  std::vector<std::pair<std::string, AttrPattern>> attrs;
  uint64_t match_count = 0;

  static std::string compute_id(const std::string& operation,
                                const std::vector<std::pair<std::string, AttrPattern>>& attrs,
                                double alpha);
};

struct ParamValue {
  enum class Kind : uint8_t { Fill, Residual, RawNumber, Zero };
  Kind kind = Kind::Fill;
  std::string fill;  // Fill: raw wildcard text
  double num = 0.0;  // Residual / RawNumber payload

  bool operator==(const ParamValue& o) const {
    return kind == o.kind && fill == o.fill && num == o.num;
  }
};

// A string attribute whose byte layout deviates from the template default
// stores its observed boundary gaps; attr_index addresses the span's
// attribute position.
struct LayoutOverride {
  uint32_t attr_index = 0;
  std::vector<std::string> gaps;
};

// Variable half of one span: identity, metadata, and one parameter per
// template wildcard / numeric attribute, in attribute order. Substituting
// into the span pattern reproduces the original attribute values exactly.
struct SpanParams {
  std::string span_id;
  std::string parent_span_id;
  std::string pattern_id;
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<ParamValue> params;
  std::vector<LayoutOverride> layouts;
};

// Content-addressed dictionaries for both pattern levels. Node-based maps, so
// pattern pointers stay valid for the pool's lifetime; insertion order is
// recorded for deterministic export.
class PatternPool {
 public:
  const StringPattern* intern_string(StringPattern p);
  const StringPattern* find_string(const std::string& id) const;
  SpanPattern* intern_span(const std::string& operation,
                           std::vector<std::pair<std::string, AttrPattern>> attrs, double alpha,
                           bool* inserted = nullptr);
  SpanPattern* find_span(const std::string& id);
  const SpanPattern* find_span(const std::string& id) const;
  const std::vector<const StringPattern*>& string_patterns() const { return string_order_; }
  const std::vector<SpanPattern*>& span_patterns() const { return span_order_; }
  uint64_t version() const { return version_; }

 private:
  std::unordered_map<std::string, StringPattern> strings_;
  std::unordered_map<std::string, SpanPattern> spans_;
  std::vector<const StringPattern*> string_order_;
  std::vector<SpanPattern*> span_order_;
  uint64_t version_ = 0;
};

// Dictionary line format, shared by pattern-delta payloads and patterns.dict.
// String templates are embedded, so a line is self-contained.
std::string span_pattern_to_json(const SpanPattern& sp, const PatternPool& pool);
const SpanPattern* span_pattern_from_json(std::string_view line, PatternPool& pool);

// Inverse of parsing: pattern + params back to the original span.
std::optional<Span> reconstruct_span(const SpanParams& params, const std::string& trace_id,
                                     const std::string& agent_id, const PatternPool& dict);

// Template learner for one attribute key.
class StringAttrParser {
 public:
  StringAttrParser(double threshold, PatternPool* pool);

  // Warmup splits into a cluster pass (safe to run for different keys in
  // parallel: touches only this parser) and an extract pass (inserts into the
  // shared pool, serial across keys).
  void warm_cluster(const std::vector<std::string_view>& values);
  void warm_extract();

  struct Outcome {
    const StringPattern* pattern = nullptr;
    StringMatch match;
  };
  // Online path: prefix-tree match, else join-or-create a cluster and update
  // the tree. Never fails: a value that fits nothing becomes its own pattern.
  Outcome parse(std::string_view value);
  // Read-only probe used by the batch prefilter.
  const StringPattern* try_match(const Tokenized& value) const;

  uint64_t mutations() const { return mutations_; }
  size_t cluster_count() const { return clusters_.size(); }

 private:
  struct Cluster {
    ClusterProto proto;
    Tokenized rep;
    std::vector<std::string> rep_tokens;
    const StringPattern* pattern = nullptr;
    uint64_t size = 0;
  };
  // First-fit in creation order; -1 when no cluster accepts the value.
  // Warmup scans every cluster; the online path only visits clusters whose
  // representative shares the value's first token, bounding per-span latency.
  ptrdiff_t assign(const Tokenized& value, bool first_token_scope);
  size_t create_cluster(const Tokenized& value);
  void publish(Cluster& c);

  double threshold_;
  PatternPool* pool_;
  PrefixTree tree_;
  std::vector<Cluster> clusters_;
  std::unordered_map<std::string, std::vector<size_t>> by_first_token_;
  uint64_t mutations_ = 0;
};

// Per-agent span parser: independent attribute parsers plus the combination
// step. parse() is the serial reference; parse_batch() resolves attribute
// matches against a frozen library in parallel and reconciles misses serially
// in input order, re-matching the remainder whenever a miss mutated the
// library, so its output is bit-identical to serial parse() calls.
class SpanParser {
 public:
  SpanParser(ParserConfig cfg, PatternPool* pool);

  void warm(const std::vector<const Span*>& sample, bool parallel);
  bool warmed() const { return warmed_; }

  SpanParams parse(const Span& s);
  std::vector<SpanParams> parse_batch(const std::vector<const Span*>& spans, bool parallel);

  uint64_t attr_version() const;
  const ParserConfig& config() const { return cfg_; }
  PatternPool& pool() { return *pool_; }

 private:
  struct PreResult {
    bool ok = false;
    SpanParams out;
    std::vector<std::pair<std::string, AttrPattern>> attrs;
  };
  PreResult try_resolve(const Span& s) const;
  void commit(PreResult& pre, const Span& s, bool bump_count, SpanParams* out);
  SpanParams parse_impl(const Span& s, bool bump_count);
  void resolve_numeric(const std::string& key, double d,
                       std::vector<std::pair<std::string, AttrPattern>>& attrs,
                       std::vector<ParamValue>& params) const;
  StringAttrParser& parser_for(const std::string& key);

  ParserConfig cfg_;
  PatternPool* pool_;
  std::unordered_map<std::string, std::unique_ptr<StringAttrParser>> parsers_;
  std::vector<std::string> key_order_;
  bool warmed_ = false;
};

}  // namespace mint
