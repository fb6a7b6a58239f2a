#pragma once

#include <cstdint>
#include <string>

namespace mint {

// Exponential value buckets with relative width alpha. gamma = (1+alpha)/(1-alpha);
// bucket i >= 1 covers (gamma^(i-1), gamma^i], bucket 0 covers (0, 1].
// Negative and zero values get reserved ids: their exact value travels in the
// parameters instead of a residual.
constexpr int32_t kBucketNegative = -1;
constexpr int32_t kBucketZero = -2;

double bucket_gamma(double alpha);

// Index of the bucket containing d (> 0 required; callers route d <= 0 to the
// reserved ids). Seeded from ceil(log_gamma d) and then corrected against the
// actual interval bounds so membership never depends on log rounding.
int32_t bucket_index(double d, double alpha);

struct BucketInterval {
  double lower = 0.0;  // exclusive
  double upper = 0.0;  // inclusive
};
BucketInterval bucket_interval(int32_t index, double alpha);

// Residual r such that lower + r == d exactly (bitwise). d - lower can round,
// so the result is nudged by ulps until the sum restores d; a suitable r
// always exists because r < d implies ulp(r) <= ulp(d).
double exact_residual(double d, double lower);

std::string format_interval(int32_t index, double alpha);

}  // namespace mint
