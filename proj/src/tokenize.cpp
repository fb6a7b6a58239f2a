#include "mint/tokenize.hpp"

namespace mint {

namespace {

inline bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

inline bool is_word(unsigned char c) {
  if (c >= 0x80) return true;
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

}  // namespace

std::string_view Tokenized::gap(size_t i) const {
  size_t from = (i == 0) ? 0 : spans[i - 1].end;
  size_t to = (i == spans.size()) ? text.size() : spans[i].begin;
  return std::string_view(text).substr(from, to - from);
}

std::vector<std::string> Tokenized::tokens() const {
  std::vector<std::string> out;
  out.reserve(spans.size());
  for (size_t i = 0; i < spans.size(); ++i) out.emplace_back(token(i));
  return out;
}

std::string_view Tokenized::raw(size_t first, size_t last) const {
  return std::string_view(text).substr(spans[first].begin, spans[last].end - spans[first].begin);
}

Tokenized tokenize_spans(std::string_view s) {
  Tokenized out;
  out.text.assign(s);
  size_t i = 0;
  const size_t n = s.size();
  while (i < n) {
    unsigned char c = s[i];
    if (is_space(c)) {
      ++i;
    } else if (is_word(c)) {
      size_t b = i;
      while (i < n && is_word(static_cast<unsigned char>(s[i]))) ++i;
      out.spans.push_back({b, i});
    } else {
      out.spans.push_back({i, i + 1});
      ++i;
    }
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view s) { return tokenize_spans(s).tokens(); }

}  // namespace mint
