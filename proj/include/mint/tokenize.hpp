#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mint {

// Byte range of one token inside the string it was cut from.
struct TokenSpan {
  size_t begin = 0;
  size_t end = 0;
};

// Tokens plus enough position data to put the original string back together.
// gap(i) is the text between token i-1 and token i; gap(0) is the leading run,
// gap(size()) the trailing one. gap(0) + token(0) + gap(1) + ... reproduces
// the input byte for byte.
struct Tokenized {
  std::string text;
  std::vector<TokenSpan> spans;

  size_t size() const { return spans.size(); }
  std::string_view token(size_t i) const {
    return std::string_view(text).substr(spans[i].begin, spans[i].end - spans[i].begin);
  }
  std::string_view gap(size_t i) const;
  std::vector<std::string> tokens() const;
  // Raw text from the start of token `first` to the end of token `last`,
  // interior gaps included.
  std::string_view raw(size_t first, size_t last) const;
};

// Splits on whitespace; every punctuation byte becomes its own token.
// Underscore counts as a word character so identifiers stay whole, and bytes
// >= 0x80 are word characters so UTF-8 sequences are never cut.
Tokenized tokenize_spans(std::string_view s);
std::vector<std::string> tokenize(std::string_view s);

}  // namespace mint
