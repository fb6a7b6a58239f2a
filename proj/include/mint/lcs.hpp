#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mint {

size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);

// |LCS(a,b)| / max(|a|,|b|). Two empty sequences are identical, so 1.0.
double lcs_similarity(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Which positions of a and b belong to one fixed LCS. The backtrace prefers
// matching late positions and, on ties, stepping over a-side tokens, so the
// chosen subsequence is deterministic.
struct LcsAlignment {
  std::vector<char> a_in;
  std::vector<char> b_in;
};
LcsAlignment lcs_align(const std::vector<std::string>& a, const std::vector<std::string>& b);

}  // namespace mint
