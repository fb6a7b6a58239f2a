#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "mint/string_pattern.hpp"
#include "mint/tokenize.hpp"

namespace mint {

// Token prefix tree over templates. Fixed tokens are edges keyed by token
// text; a wildcard is a single dedicated edge whose traversal consumes one
// run of >= 1 tokens. Lookup prefers fixed edges over the wildcard edge at
// every node and tries shorter wildcard runs first, so any value resolves to
// at most one template and ties go to the longest fixed prefix.
class PrefixTree {
 public:
  void insert(const StringPattern* p);
  // Clears the terminal at the item path if it currently points to `p`.
  void remove(const StringPattern* p);
  const StringPattern* match(const Tokenized& value) const;
  size_t node_count() const { return nodes_; }

 private:
  struct Node {
    std::map<std::string, std::unique_ptr<Node>> fixed;
    std::unique_ptr<Node> wild;
    const StringPattern* terminal = nullptr;
  };
  Node* walk_insert(const std::vector<TemplateItem>& items);
  Node root_;
  size_t nodes_ = 1;
};

}  // namespace mint
