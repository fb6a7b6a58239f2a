#include "mint/span_parser.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstring>

#include "json.hpp"

#include "mint/common.hpp"
#include "mint/lcs.hpp"

namespace mint {

namespace {
constexpr char kUnit = '\x1f';
constexpr char kGroup = '\x1e';
using ojson = nlohmann::ordered_json;
}  // namespace

// ---------------------------------------------------------------- PatternPool

const StringPattern* PatternPool::intern_string(StringPattern p) {
  auto it = strings_.find(p.id);
  if (it != strings_.end()) return &it->second;
  auto [pos, fresh] = strings_.emplace(p.id, std::move(p));
  (void)fresh;
  string_order_.push_back(&pos->second);
  ++version_;
  return &pos->second;
}

const StringPattern* PatternPool::find_string(const std::string& id) const {
  auto it = strings_.find(id);
  return it == strings_.end() ? nullptr : &it->second;
}

SpanPattern* PatternPool::intern_span(const std::string& operation,
                                      std::vector<std::pair<std::string, AttrPattern>> attrs,
                                      double alpha, bool* inserted) {
  std::string id = SpanPattern::compute_id(operation, attrs, alpha);
  auto it = spans_.find(id);
  if (it != spans_.end()) {
    if (inserted) *inserted = false;
    return &it->second;
  }
  SpanPattern sp;
  sp.id = std::move(id);
  sp.operation = operation;
  sp.alpha = alpha;
  sp.attrs = std::move(attrs);
  auto [pos, fresh] = spans_.emplace(sp.id, std::move(sp));
  (void)fresh;
  span_order_.push_back(&pos->second);
  ++version_;
  if (inserted) *inserted = true;
  return &pos->second;
}

SpanPattern* PatternPool::find_span(const std::string& id) {
  auto it = spans_.find(id);
  return it == spans_.end() ? nullptr : &it->second;
}

const SpanPattern* PatternPool::find_span(const std::string& id) const {
  auto it = spans_.find(id);
  return it == spans_.end() ? nullptr : &it->second;
}

std::string SpanPattern::compute_id(const std::string& operation,
                                    const std::vector<std::pair<std::string, AttrPattern>>& attrs,
                                    double alpha) {
  std::string blob;
  blob += operation;
  blob += kGroup;
  uint64_t alpha_bits = 0;
  static_assert(sizeof alpha_bits == sizeof alpha);
  std::memcpy(&alpha_bits, &alpha, sizeof alpha_bits);
  blob += hex16(alpha_bits);
  for (const auto& [key, ap] : attrs) {
    blob += kGroup;
    blob += key;
    blob += kUnit;
    switch (ap.kind) {
      case AttrPattern::Kind::String:
        blob += 's';
        blob += kUnit;
        blob += ap.string_pattern_id;
        break;
      case AttrPattern::Kind::Bucket:
        blob += 'b';
        blob += kUnit;
        blob += std::to_string(ap.bucket);
        break;
      case AttrPattern::Kind::Negative:
        blob += 'n';
        break;
      case AttrPattern::Kind::Zero:
        blob += 'z';
        break;
    }
  }
  return content_id(blob);
}

// ------------------------------------------------------------ dict line format

std::string span_pattern_to_json(const SpanPattern& sp, const PatternPool& pool) {
  ojson j;
  j["pattern"] = sp.id;
  j["operation"] = sp.operation;
  j["alpha"] = sp.alpha;
  j["match_count"] = sp.match_count;
  ojson attrs = ojson::array();
  for (const auto& [key, ap] : sp.attrs) {
    ojson a;
    a["key"] = key;
    switch (ap.kind) {
      case AttrPattern::Kind::String: {
        a["type"] = "str";
        a["template"] = ap.string_pattern_id;
        const StringPattern* p = pool.find_string(ap.string_pattern_id);
        // Embed the template so a dictionary line stands on its own.
        ojson items = ojson::array();
        if (p) {
          for (const TemplateItem& it : p->items) {
            if (it.kind == TemplateItem::Kind::Fixed)
              items.push_back(ojson::array({"f", it.token}));
            else
              items.push_back(ojson::array({"w"}));
          }
          a["items"] = std::move(items);
          a["gaps"] = p->default_gaps;
          a["cluster_size"] = p->origin_cluster_size;
        }
        break;
      }
      case AttrPattern::Kind::Bucket:
        a["type"] = "bucket";
        a["bucket"] = ap.bucket;
        break;
      case AttrPattern::Kind::Negative:
        a["type"] = "negative";
        break;
      case AttrPattern::Kind::Zero:
        a["type"] = "zero";
        break;
    }
    attrs.push_back(std::move(a));
  }
  j["attrs"] = std::move(attrs);
  return j.dump();
}

const SpanPattern* span_pattern_from_json(std::string_view line, PatternPool& pool) {
  ojson j = ojson::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return nullptr;
  if (!j.contains("pattern") || !j["pattern"].is_string()) return nullptr;
  if (!j.contains("operation") || !j["operation"].is_string()) return nullptr;
  if (!j.contains("alpha") || !j["alpha"].is_number()) return nullptr;
  if (!j.contains("attrs") || !j["attrs"].is_array()) return nullptr;

  std::vector<std::pair<std::string, AttrPattern>> attrs;
  for (const auto& a : j["attrs"]) {
    if (!a.is_object() || !a.contains("key") || !a["key"].is_string() || !a.contains("type"))
      return nullptr;
    AttrPattern ap;
    const std::string type = a["type"].get<std::string>();
    if (type == "str") {
      if (!a.contains("items") || !a["items"].is_array() || !a.contains("gaps") ||
          !a["gaps"].is_array())
        return nullptr;
      StringPattern p;
      for (const auto& it : a["items"]) {
        if (!it.is_array() || it.empty() || !it[0].is_string()) return nullptr;
        const std::string tag = it[0].get<std::string>();
        if (tag == "f") {
          if (it.size() != 2 || !it[1].is_string()) return nullptr;
          p.items.push_back(TemplateItem::fixed(it[1].get<std::string>()));
        } else if (tag == "w") {
          p.items.push_back(TemplateItem::wild());
          ++p.wildcards;
        } else {
          return nullptr;
        }
      }
      for (const auto& g : a["gaps"]) {
        if (!g.is_string()) return nullptr;
        p.default_gaps.push_back(g.get<std::string>());
      }
      if (p.default_gaps.size() != p.items.size() + 1) return nullptr;
      if (a.contains("cluster_size") && a["cluster_size"].is_number_unsigned())
        p.origin_cluster_size = a["cluster_size"].get<uint64_t>();
      p.id = StringPattern::compute_id(p.items, p.default_gaps);
      if (a.contains("template") && a["template"] != p.id) return nullptr;
      ap.kind = AttrPattern::Kind::String;
      ap.string_pattern_id = pool.intern_string(std::move(p))->id;
    } else if (type == "bucket") {
      if (!a.contains("bucket") || !a["bucket"].is_number_integer()) return nullptr;
      ap.kind = AttrPattern::Kind::Bucket;
      ap.bucket = a["bucket"].get<int32_t>();
    } else if (type == "negative") {
      ap.kind = AttrPattern::Kind::Negative;
    } else if (type == "zero") {
      ap.kind = AttrPattern::Kind::Zero;
    } else {
      return nullptr;
    }
    attrs.emplace_back(a["key"].get<std::string>(), std::move(ap));
  }

  SpanPattern* sp = pool.intern_span(j["operation"].get<std::string>(), std::move(attrs),
                                     j["alpha"].get<double>());
  if (sp->id != j["pattern"].get<std::string>()) return nullptr;
  if (j.contains("match_count") && j["match_count"].is_number_unsigned())
    sp->match_count = std::max(sp->match_count, j["match_count"].get<uint64_t>());
  return sp;
}

// ------------------------------------------------------------- reconstruction

std::optional<Span> reconstruct_span(const SpanParams& params, const std::string& trace_id,
                                     const std::string& agent_id, const PatternPool& dict) {
  const SpanPattern* sp = dict.find_span(params.pattern_id);
  if (!sp) return std::nullopt;
  Span s;
  s.trace_id = trace_id;
  s.agent_id = agent_id;
  s.span_id = params.span_id;
  s.parent_span_id = params.parent_span_id;
  s.operation = sp->operation;
  s.metadata = params.metadata;

  size_t cursor = 0;
  auto next = [&](ParamValue::Kind want) -> const ParamValue* {
    if (cursor >= params.params.size()) return nullptr;
    const ParamValue& pv = params.params[cursor];
    if (pv.kind != want) return nullptr;
    ++cursor;
    return &pv;
  };

  for (uint32_t i = 0; i < sp->attrs.size(); ++i) {
    const auto& [key, ap] = sp->attrs[i];
    switch (ap.kind) {
      case AttrPattern::Kind::String: {
        const StringPattern* p = dict.find_string(ap.string_pattern_id);
        if (!p) return std::nullopt;
        std::vector<std::string> fills;
        fills.reserve(p->wildcards);
        for (uint32_t w = 0; w < p->wildcards; ++w) {
          const ParamValue* pv = next(ParamValue::Kind::Fill);
          if (!pv) return std::nullopt;
          fills.push_back(pv->fill);
        }
        const std::vector<std::string>* gaps = nullptr;
        for (const LayoutOverride& lo : params.layouts)
          if (lo.attr_index == i) gaps = &lo.gaps;
        s.attributes.emplace_back(key, AttributeValue::string(substitute(*p, fills, gaps)));
        break;
      }
      case AttrPattern::Kind::Bucket: {
        const ParamValue* pv = next(ParamValue::Kind::Residual);
        if (!pv) return std::nullopt;
        const double lower = bucket_interval(ap.bucket, sp->alpha).lower;
        s.attributes.emplace_back(key, AttributeValue::number(lower + pv->num));
        break;
      }
      case AttrPattern::Kind::Negative: {
        const ParamValue* pv = next(ParamValue::Kind::RawNumber);
        if (!pv) return std::nullopt;
        s.attributes.emplace_back(key, AttributeValue::number(pv->num));
        break;
      }
      case AttrPattern::Kind::Zero: {
        if (!next(ParamValue::Kind::Zero)) return std::nullopt;
        s.attributes.emplace_back(key, AttributeValue::number(0.0));
        break;
      }
    }
  }
  if (cursor != params.params.size()) return std::nullopt;
  return s;
}

// ------------------------------------------------------------ StringAttrParser

StringAttrParser::StringAttrParser(double threshold, PatternPool* pool)
    : threshold_(threshold), pool_(pool) {}

ptrdiff_t StringAttrParser::assign(const Tokenized& value, bool first_token_scope) {
  const std::vector<std::string> toks = value.tokens();
  auto try_join = [&](size_t ci) -> bool {
    Cluster& c = clusters_[ci];
    if (lcs_similarity(toks, c.rep_tokens) < threshold_) return false;
    if (!c.proto.merge(toks)) return false;
    ++c.size;
    return true;
  };
  if (first_token_scope) {
    const std::string first = value.size() ? std::string(value.token(0)) : std::string();
    auto it = by_first_token_.find(first);
    if (it == by_first_token_.end()) return -1;
    for (size_t ci : it->second)
      if (try_join(ci)) return static_cast<ptrdiff_t>(ci);
    return -1;
  }
  for (size_t ci = 0; ci < clusters_.size(); ++ci)
    if (try_join(ci)) return static_cast<ptrdiff_t>(ci);
  return -1;
}

size_t StringAttrParser::create_cluster(const Tokenized& value) {
  Cluster c;
  c.rep_tokens = value.tokens();
  c.proto = ClusterProto::from_tokens(c.rep_tokens);
  c.rep = value;
  c.size = 1;
  const size_t idx = clusters_.size();
  const std::string first = value.size() ? std::string(value.token(0)) : std::string();
  by_first_token_[first].push_back(idx);
  clusters_.push_back(std::move(c));
  return idx;
}

void StringAttrParser::publish(Cluster& c) {
  StringPattern np = extract_pattern(c.proto, c.rep);
  np.origin_cluster_size = c.size;
  const StringPattern* p = pool_->intern_string(std::move(np));
  if (c.pattern == p) return;  // template unchanged, tree already current
  if (c.pattern) tree_.remove(c.pattern);
  tree_.insert(p);
  c.pattern = p;
  ++mutations_;
}

void StringAttrParser::warm_cluster(const std::vector<std::string_view>& values) {
  for (std::string_view v : values) {
    Tokenized tv = tokenize_spans(v);
    if (assign(tv, /*first_token_scope=*/false) < 0) create_cluster(tv);
  }
}

void StringAttrParser::warm_extract() {
  for (Cluster& c : clusters_) publish(c);
}

StringAttrParser::Outcome StringAttrParser::parse(std::string_view value) {
  Tokenized tv = tokenize_spans(value);
  if (const StringPattern* p = tree_.match(tv)) {
    auto m = match_template(*p, tv);
    assert(m);  // a tree hit is a template match by construction
    return {p, std::move(*m)};
  }
  ptrdiff_t ci = assign(tv, /*first_token_scope=*/true);
  if (ci < 0) ci = static_cast<ptrdiff_t>(create_cluster(tv));
  publish(clusters_[ci]);
  const StringPattern* p = clusters_[ci].pattern;
  auto m = match_template(*p, tv);
  assert(m);  // merge acceptance guarantees the new member matches
  return {p, std::move(*m)};
}

const StringPattern* StringAttrParser::try_match(const Tokenized& value) const {
  return tree_.match(value);
}

// ----------------------------------------------------------------- SpanParser

SpanParser::SpanParser(ParserConfig cfg, PatternPool* pool) : cfg_(cfg), pool_(pool) {}

StringAttrParser& SpanParser::parser_for(const std::string& key) {
  auto it = parsers_.find(key);
  if (it == parsers_.end()) {
    it = parsers_
             .emplace(key, std::make_unique<StringAttrParser>(cfg_.similarity_threshold, pool_))
             .first;
    key_order_.push_back(key);
  }
  return *it->second;
}

void SpanParser::resolve_numeric(const std::string& key, double d,
                                 std::vector<std::pair<std::string, AttrPattern>>& attrs,
                                 std::vector<ParamValue>& params) const {
  AttrPattern ap;
  ParamValue pv;
  if (d > 0.0) {
    ap.kind = AttrPattern::Kind::Bucket;
    ap.bucket = bucket_index(d, cfg_.alpha);
    pv.kind = ParamValue::Kind::Residual;
    pv.num = exact_residual(d, bucket_interval(ap.bucket, cfg_.alpha).lower);
  } else if (d < 0.0 || std::signbit(d)) {  // signbit keeps -0.0 exact
    ap.kind = AttrPattern::Kind::Negative;
    pv.kind = ParamValue::Kind::RawNumber;
    pv.num = d;
  } else {
    ap.kind = AttrPattern::Kind::Zero;
    pv.kind = ParamValue::Kind::Zero;
  }
  attrs.emplace_back(key, std::move(ap));
  params.push_back(std::move(pv));
}

SpanParams SpanParser::parse_impl(const Span& s, bool bump_count) {
  SpanParams out;
  out.span_id = s.span_id;
  out.parent_span_id = s.parent_span_id;
  out.metadata = s.metadata;
  std::vector<std::pair<std::string, AttrPattern>> attrs;
  attrs.reserve(s.attributes.size());
  for (uint32_t i = 0; i < s.attributes.size(); ++i) {
    const auto& [key, val] = s.attributes[i];
    if (val.kind == AttributeValue::Kind::String) {
      auto oc = parser_for(key).parse(val.str);
      AttrPattern ap;
      ap.kind = AttrPattern::Kind::String;
      ap.string_pattern_id = oc.pattern->id;
      attrs.emplace_back(key, std::move(ap));
      for (std::string& f : oc.match.fills) {
        ParamValue pv;
        pv.kind = ParamValue::Kind::Fill;
        pv.fill = std::move(f);
        out.params.push_back(std::move(pv));
      }
      if (oc.match.layout_differs) out.layouts.push_back({i, std::move(oc.match.gaps)});
    } else {
      resolve_numeric(key, val.num, attrs, out.params);
    }
  }
  SpanPattern* sp = pool_->intern_span(s.operation, std::move(attrs), cfg_.alpha);
  if (bump_count) ++sp->match_count;
  out.pattern_id = sp->id;
  return out;
}

SpanParams SpanParser::parse(const Span& s) { return parse_impl(s, true); }

SpanParser::PreResult SpanParser::try_resolve(const Span& s) const {
  PreResult r;
  r.out.span_id = s.span_id;
  r.out.parent_span_id = s.parent_span_id;
  r.out.metadata = s.metadata;
  r.attrs.reserve(s.attributes.size());
  for (uint32_t i = 0; i < s.attributes.size(); ++i) {
    const auto& [key, val] = s.attributes[i];
    if (val.kind == AttributeValue::Kind::String) {
      auto it = parsers_.find(key);
      if (it == parsers_.end()) return r;
      Tokenized tv = tokenize_spans(val.str);
      const StringPattern* p = it->second->try_match(tv);
      if (!p) return r;
      auto m = match_template(*p, tv);
      assert(m);
      AttrPattern ap;
      ap.kind = AttrPattern::Kind::String;
      ap.string_pattern_id = p->id;
      r.attrs.emplace_back(key, std::move(ap));
      for (std::string& f : m->fills) {
        ParamValue pv;
        pv.kind = ParamValue::Kind::Fill;
        pv.fill = std::move(f);
        r.out.params.push_back(std::move(pv));
      }
      if (m->layout_differs) r.out.layouts.push_back({i, std::move(m->gaps)});
    } else {
      resolve_numeric(key, val.num, r.attrs, r.out.params);
    }
  }
  r.ok = true;
  return r;
}

void SpanParser::commit(PreResult& pre, const Span& s, bool bump_count, SpanParams* out) {
  SpanPattern* sp = pool_->intern_span(s.operation, std::move(pre.attrs), cfg_.alpha);
  if (bump_count) ++sp->match_count;
  pre.out.pattern_id = sp->id;
  if (out) *out = std::move(pre.out);
}

void SpanParser::warm(const std::vector<const Span*>& sample, bool parallel) {
  std::vector<std::string> keys;
  std::unordered_map<std::string, std::vector<std::string_view>> by_key;
  for (const Span* s : sample) {
    for (const auto& [key, val] : s->attributes) {
      if (val.kind != AttributeValue::Kind::String) continue;
      auto [it, fresh] = by_key.try_emplace(key);
      if (fresh) keys.push_back(key);
      it->second.push_back(val.str);
    }
  }
  std::vector<StringAttrParser*> ps;
  ps.reserve(keys.size());
  for (const std::string& k : keys) ps.push_back(&parser_for(k));

  // Clustering touches only per-key state, so keys can run in parallel; the
  // extract pass below writes to the shared pool and stays serial, in key
  // order, so pattern ids land in the pool in a reproducible order.
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (size_t i = 0; i < ps.size(); ++i) ps[i]->warm_cluster(by_key[keys[i]]);
  for (StringAttrParser* p : ps) p->warm_extract();

  // Register the attribute combinations seen in the sample. Counting is left
  // to the replay that follows warmup, so nothing is counted twice.
  for (const Span* s : sample) {
    PreResult pre = try_resolve(*s);
    if (pre.ok) {
      commit(pre, *s, false, nullptr);
    } else {
      // Unreachable while every sample value matched its own cluster's
      // template; kept as a safe fallback rather than an assert.
      parse_impl(*s, false);
    }
  }
  warmed_ = true;
}

uint64_t SpanParser::attr_version() const {
  uint64_t v = 0;
  for (const auto& [key, p] : parsers_) v += p->mutations();
  return v;
}

std::vector<SpanParams> SpanParser::parse_batch(const std::vector<const Span*>& spans,
                                                bool parallel) {
  const size_t n = spans.size();
  std::vector<SpanParams> results(n);
  std::vector<PreResult> pre(n);
  size_t start = 0;
  while (start < n) {
    const uint64_t v0 = attr_version();
    // Read-only prefilter against the current template library.
#pragma omp parallel for schedule(dynamic, 32) if (parallel)
    for (size_t i = start; i < n; ++i) pre[i] = try_resolve(*spans[i]);

    // Serial reconcile in input order. A miss goes through the mutating
    // parser; if that changed any template library the remaining prefilter
    // results may be stale, so they are recomputed from the next index.
    // Combination interning alone never invalidates attribute matches.
    size_t resume = n;
    for (size_t i = start; i < n; ++i) {
      if (pre[i].ok) {
        commit(pre[i], *spans[i], true, &results[i]);
      } else {
        results[i] = parse_impl(*spans[i], true);
        if (attr_version() != v0) {
          resume = i + 1;
          break;
        }
      }
    }
    if (resume == n) break;
    start = resume;
  }
  return results;
}

}  // namespace mint
