#include "mint/string_pattern.hpp"

#include <cassert>
#include <unordered_set>

#include "mint/common.hpp"
#include "mint/lcs.hpp"

namespace mint {

std::string StringPattern::rendered() const {
  std::string out;
  for (size_t i = 0; i < items.size(); ++i) {
    out += default_gaps[i];
    out += items[i].kind == TemplateItem::Kind::Wild ? "<*>" : items[i].token;
  }
  out += default_gaps[items.size()];
  return out;
}

std::string StringPattern::compute_id(const std::vector<TemplateItem>& items,
                                      const std::vector<std::string>& gaps) {
  // \x1f separates fields, \x1e separates the two sections; tokens can hold
  // anything printable so the separators must be outside the token alphabet
  // produced by tokenize (control bytes become their own tokens, but a token
  // is then exactly one byte and the kind marker disambiguates).
  std::string blob;
  for (const auto& it : items) {
    blob += it.kind == TemplateItem::Kind::Wild ? 'W' : 'F';
    blob += it.token;
    blob += '\x1f';
  }
  blob += '\x1e';
  for (const auto& g : gaps) {
    blob += g;
    blob += '\x1f';
  }
  return content_id(blob);
}

namespace {

struct Matcher {
  const std::vector<TemplateItem>& items;
  const Tokenized& value;
  // token ranges per item; wildcard item i covers runs[i] tokens
  std::vector<size_t> runs;
  std::unordered_set<uint64_t> dead;  // (item, token) states that cannot match

  bool solve(size_t ii, size_t ti) {
    if (ii == items.size()) return ti == value.size();
    uint64_t key = (static_cast<uint64_t>(ii) << 32) | ti;
    if (dead.count(key)) return false;
    const TemplateItem& it = items[ii];
    if (it.kind == TemplateItem::Kind::Fixed) {
      if (ti < value.size() && value.token(ti) == it.token && solve(ii + 1, ti + 1)) {
        runs[ii] = 1;
        return true;
      }
    } else {
      for (size_t len = 1; ti + len <= value.size(); ++len) {
        if (solve(ii + 1, ti + len)) {
          runs[ii] = len;
          return true;
        }
      }
    }
    dead.insert(key);
    return false;
  }
};

}  // namespace

std::optional<StringMatch> match_template(const StringPattern& p, const Tokenized& value) {
  Matcher m{p.items, value, std::vector<size_t>(p.items.size(), 0), {}};
  if (!m.solve(0, 0)) return std::nullopt;
  StringMatch out;
  out.gaps.reserve(p.items.size() + 1);
  size_t ti = 0;
  size_t prev_end = 0;  // byte offset of the end of the previous item region
  for (size_t ii = 0; ii < p.items.size(); ++ii) {
    size_t first = ti, last = ti + m.runs[ii] - 1;
    size_t begin = value.spans[first].begin;
    out.gaps.emplace_back(value.text.substr(prev_end, begin - prev_end));
    if (p.items[ii].kind == TemplateItem::Kind::Wild)
      out.fills.emplace_back(value.raw(first, last));
    prev_end = value.spans[last].end;
    ti += m.runs[ii];
  }
  out.gaps.emplace_back(value.text.substr(prev_end));
  out.layout_differs = out.gaps != p.default_gaps;
  return out;
}

std::string substitute(const StringPattern& p, const std::vector<std::string>& fills,
                       const std::vector<std::string>* gap_override) {
  const std::vector<std::string>& gaps = gap_override ? *gap_override : p.default_gaps;
  assert(gaps.size() == p.items.size() + 1);
  std::string out;
  size_t w = 0;
  for (size_t i = 0; i < p.items.size(); ++i) {
    out += gaps[i];
    if (p.items[i].kind == TemplateItem::Kind::Wild)
      out += fills.at(w++);
    else
      out += p.items[i].token;
  }
  out += gaps[p.items.size()];
  return out;
}

ClusterProto ClusterProto::from_tokens(const std::vector<std::string>& tokens) {
  ClusterProto p;
  p.fixed = tokens;
  p.wild.assign(tokens.size() + 1, 0);
  return p;
}

bool ClusterProto::merge(const std::vector<std::string>& member) {
  const size_t an = fixed.size(), bn = member.size();
  LcsAlignment al = lcs_align(fixed, member);
  std::vector<size_t> a_anchor, b_anchor;
  for (size_t i = 0; i < an; ++i)
    if (al.a_in[i]) a_anchor.push_back(i);
  for (size_t i = 0; i < bn; ++i)
    if (al.b_in[i]) b_anchor.push_back(i);
  assert(a_anchor.size() == b_anchor.size());

  std::vector<std::string> new_fixed;
  std::vector<char> new_wild;
  const size_t k = a_anchor.size();
  for (size_t r = 0; r <= k; ++r) {
    // region r: everything strictly between anchor r-1 and anchor r
    size_t a_from = (r == 0) ? 0 : a_anchor[r - 1] + 1;
    size_t a_to = (r == k) ? an : a_anchor[r];
    size_t b_from = (r == 0) ? 0 : b_anchor[r - 1] + 1;
    size_t b_to = (r == k) ? bn : b_anchor[r];

    // a-side content: dropped fixed tokens, or an old wildcard slot in range.
    // Slot i precedes fixed[i], so the region covers slots a_from..a_to.
    bool a_side = a_to > a_from;
    for (size_t slot = a_from; slot <= a_to && !a_side; ++slot)
      if (wild[slot]) a_side = true;
    size_t b_count = b_to - b_from;

    bool is_wild = a_side || b_count > 0;
    if (is_wild) {
      if (!a_side) return false;       // pure insertion: old members have no tokens here
      if (b_count == 0) return false;  // new member cannot fill the wildcard
    }
    new_wild.push_back(is_wild ? 1 : 0);
    if (r < k) new_fixed.push_back(fixed[a_anchor[r]]);
  }
  fixed = std::move(new_fixed);
  wild = std::move(new_wild);
  return true;
}

std::vector<TemplateItem> ClusterProto::items() const {
  std::vector<TemplateItem> out;
  for (size_t i = 0; i <= fixed.size(); ++i) {
    if (wild[i]) out.push_back(TemplateItem::wild());
    if (i < fixed.size()) out.push_back(TemplateItem::fixed(fixed[i]));
  }
  return out;
}

StringPattern extract_pattern(const ClusterProto& proto, const Tokenized& representative) {
  StringPattern p;
  p.items = proto.items();
  for (const auto& it : p.items)
    if (it.kind == TemplateItem::Kind::Wild) ++p.wildcards;
  // match cannot fail: the representative is a member
  p.default_gaps.assign(p.items.size() + 1, std::string());
  auto m = match_template(p, representative);
  assert(m.has_value());
  p.default_gaps = m->gaps;
  p.id = StringPattern::compute_id(p.items, p.default_gaps);
  return p;
}

}  // namespace mint
