#include "mint/prefix_tree.hpp"

#include <cstdint>
#include <unordered_set>

namespace mint {

PrefixTree::Node* PrefixTree::walk_insert(const std::vector<TemplateItem>& items) {
  Node* n = &root_;
  for (const auto& it : items) {
    if (it.kind == TemplateItem::Kind::Fixed) {
      auto& slot = n->fixed[it.token];
      if (!slot) {
        slot = std::make_unique<Node>();
        ++nodes_;
      }
      n = slot.get();
    } else {
      if (!n->wild) {
        n->wild = std::make_unique<Node>();
        ++nodes_;
      }
      n = n->wild.get();
    }
  }
  return n;
}

void PrefixTree::insert(const StringPattern* p) {
  Node* n = walk_insert(p->items);
  // Two clusters can evolve identical item paths; the first owner keeps the
  // terminal and later members still parse byte-exactly via layout overrides.
  if (!n->terminal) n->terminal = p;
}

void PrefixTree::remove(const StringPattern* p) {
  Node* n = &root_;
  for (const auto& it : p->items) {
    if (it.kind == TemplateItem::Kind::Fixed) {
      auto f = n->fixed.find(it.token);
      if (f == n->fixed.end()) return;
      n = f->second.get();
    } else {
      if (!n->wild) return;
      n = n->wild.get();
    }
  }
  if (n->terminal == p) n->terminal = nullptr;
}

const StringPattern* PrefixTree::match(const Tokenized& value) const {
  // Dead-state memo keeps pathological inputs polynomial; node pointers
  // double as memo keys.
  std::unordered_set<uint64_t> dead;
  auto key = [](const Node* n, size_t ti) {
    return reinterpret_cast<uint64_t>(n) * 0x9e3779b97f4a7c15ull + static_cast<uint64_t>(ti);
  };
  const size_t n_tokens = value.size();

  auto rec = [&](auto&& self, const Node* node, size_t ti) -> const StringPattern* {
    uint64_t k = key(node, ti);
    if (dead.count(k)) return nullptr;
    if (ti == n_tokens) {
      if (node->terminal) return node->terminal;
    } else {
      auto f = node->fixed.find(std::string(value.token(ti)));
      if (f != node->fixed.end()) {
        if (const StringPattern* p = self(self, f->second.get(), ti + 1)) return p;
      }
    }
    if (node->wild) {
      for (size_t len = 1; ti + len <= n_tokens; ++len) {
        if (const StringPattern* p = self(self, node->wild.get(), ti + len)) return p;
      }
    }
    dead.insert(k);
    return nullptr;
  };
  return rec(rec, &root_, 0);
}

}  // namespace mint
