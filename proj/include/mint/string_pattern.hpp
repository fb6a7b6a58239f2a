#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mint/tokenize.hpp"

namespace mint {

struct TemplateItem {
  enum class Kind : uint8_t { Fixed, Wild };
  Kind kind = Kind::Fixed;
  std::string token;  // Fixed only

  static TemplateItem fixed(std::string t) { return {Kind::Fixed, std::move(t)}; }
  static TemplateItem wild() { return {Kind::Wild, {}}; }
  bool operator==(const TemplateItem& o) const { return kind == o.kind && token == o.token; }
};

// A learned template over token sequences. default_gaps is the byte layout of
// the cluster representative (items.size()+1 boundary gaps); together with
// per-span wildcard fills (and a layout override when a span's gaps deviate)
// it reproduces member strings byte for byte.
struct StringPattern {
  std::string id;
  std::vector<TemplateItem> items;
  std::vector<std::string> default_gaps;
  uint32_t wildcards = 0;
  uint64_t origin_cluster_size = 1;  // members in the cluster that produced it

  std::string rendered() const;  // display form, wildcards shown as <*>
  static std::string compute_id(const std::vector<TemplateItem>& items,
                                const std::vector<std::string>& gaps);
};

struct StringMatch {
  std::vector<std::string> fills;  // one raw substring per wildcard, interior gaps included
  std::vector<std::string> gaps;   // observed boundary gaps, items.size()+1
  bool layout_differs = false;
};

// Token-level match with byte extraction. A wildcard consumes one run of >= 1
// tokens; runs are tried shortest-first with backtracking, which fixes the
// alignment deterministically.
std::optional<StringMatch> match_template(const StringPattern& p, const Tokenized& value);

std::string substitute(const StringPattern& p, const std::vector<std::string>& fills,
                       const std::vector<std::string>* gap_override);

// Cluster shape maintained incrementally: fixed tokens with a wildcard flag
// for each slot between/around them (wild[i] precedes fixed[i]). Merging a new
// member aligns it against the fixed tokens by LCS; a merge is rejected when
// the merged template would stop matching previous members (a wildcard slot
// appearing where old members have no tokens) or would not match the new
// member itself (a slot where it has none). Rejection means "does not fit this
// cluster" and the caller moves on, so members never need to be re-verified or
// retained.
struct ClusterProto {
  std::vector<std::string> fixed;
  std::vector<char> wild;  // size fixed.size()+1

  static ClusterProto from_tokens(const std::vector<std::string>& tokens);
  bool merge(const std::vector<std::string>& member);
  std::vector<TemplateItem> items() const;
};

// Template for the cluster, with the representative's layout as the default.
// The representative is a member, so it always matches.
StringPattern extract_pattern(const ClusterProto& proto, const Tokenized& representative);

}  // namespace mint
