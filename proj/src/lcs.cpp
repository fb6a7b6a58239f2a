#include "mint/lcs.hpp"

#include <algorithm>

namespace mint {

size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const size_t n = a.size(), m = b.size();
  if (n == 0 || m == 0) return 0;
  // Two rolling rows; full table is only needed when a backtrace is wanted.
  std::vector<size_t> prev(m + 1, 0), cur(m + 1, 0);
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      if (a[i - 1] == b[j - 1])
        cur[j] = prev[j - 1] + 1;
      else
        cur[j] = std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

double lcs_similarity(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  const size_t denom = std::max(a.size(), b.size());
  return static_cast<double>(lcs_length(a, b)) / static_cast<double>(denom);
}

LcsAlignment lcs_align(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const size_t n = a.size(), m = b.size();
  LcsAlignment out;
  out.a_in.assign(n, 0);
  out.b_in.assign(m, 0);
  if (n == 0 || m == 0) return out;
  std::vector<size_t> dp((n + 1) * (m + 1), 0);
  auto at = [m](size_t i, size_t j) { return i * (m + 1) + j; };
  for (size_t i = 1; i <= n; ++i)
    for (size_t j = 1; j <= m; ++j) {
      if (a[i - 1] == b[j - 1])
        dp[at(i, j)] = dp[at(i - 1, j - 1)] + 1;
      else
        dp[at(i, j)] = std::max(dp[at(i - 1, j)], dp[at(i, j - 1)]);
    }
  size_t i = n, j = m;
  while (i > 0 && j > 0) {
    if (a[i - 1] == b[j - 1] && dp[at(i, j)] == dp[at(i - 1, j - 1)] + 1) {
      out.a_in[i - 1] = 1;
      out.b_in[j - 1] = 1;
      --i;
      --j;
    } else if (dp[at(i - 1, j)] >= dp[at(i, j - 1)]) {
      --i;
    } else {
      --j;
    }
  }
  return out;
}

}  // namespace mint
