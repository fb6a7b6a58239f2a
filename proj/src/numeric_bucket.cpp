#include "mint/numeric_bucket.hpp"

#include <cassert>
#include <cmath>
#include <cstdio>

namespace mint {

double bucket_gamma(double alpha) {
  assert(alpha > 0.0 && alpha < 1.0);
  return (1.0 + alpha) / (1.0 - alpha);
}

namespace {

// gamma^i by repeated multiplication; the one definition of the bounds that
// index and interval both use, so membership checks are self-consistent.
double gamma_pow(double gamma, int32_t i) {
  double v = 1.0;
  for (int32_t k = 0; k < i; ++k) v *= gamma;
  return v;
}

}  // namespace

int32_t bucket_index(double d, double alpha) {
  assert(d > 0.0);
  const double gamma = bucket_gamma(alpha);
  double guess = std::ceil(std::log(d) / std::log(gamma));
  int32_t i = guess < 0.0 ? 0 : static_cast<int32_t>(guess);
  while (i > 0 && d <= gamma_pow(gamma, i - 1)) --i;
  while (d > gamma_pow(gamma, i)) ++i;
  return i;
}

BucketInterval bucket_interval(int32_t index, double alpha) {
  assert(index >= 0);
  const double gamma = bucket_gamma(alpha);
  BucketInterval b;
  b.lower = (index == 0) ? 0.0 : gamma_pow(gamma, index - 1);
  b.upper = gamma_pow(gamma, index);
  return b;
}

double exact_residual(double d, double lower) {
  // Monotone ulp walk: r < d means ulp(r) <= ulp(d), so lower + r moves in
  // steps of at most one ulp of d and cannot step over it.
  double r = d - lower;
  for (int step = 0; step < 64; ++step) {
    double s = lower + r;
    if (s == d) return r;
    r = std::nextafter(r, s < d ? HUGE_VAL : -HUGE_VAL);
  }
  assert(false && "no residual restores d");
  return d - lower;
}

std::string format_interval(int32_t index, double alpha) {
  if (index == kBucketNegative) return "(-inf, 0)";
  if (index == kBucketZero) return "[0, 0]";
  BucketInterval b = bucket_interval(index, alpha);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "(%.6g, %.6g]", b.lower, b.upper);
  return buf;
}

}  // namespace mint
