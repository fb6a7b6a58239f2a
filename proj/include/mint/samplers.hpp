#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mint/params_buffer.hpp"

namespace mint {

struct SamplerConfig {
  std::vector<std::string> abnormal_words;
  double quantile = 0.95;
  size_t window = 10000;
  size_t min_window = 100;
  double edge_case_c = 0.01;
  uint64_t rng_seed = 1;
  double head_rate = 0.0;  // 0 disables head sampling
  bool symptom_enabled = true;
  bool edge_enabled = true;
  // Optional backstop evaluated on finalized blocks; test hook, off by default.
  std::function<bool(const ParamBlock&)> tail_predicate;
};

struct SampleDecision {
  bool sampled = false;
  std::vector<std::string> reasons;
};

// Nearest-rank quantile: the ceil(q*n)-th smallest of the window.
std::optional<double> nearest_rank(const std::vector<double>& window, double q);

// Last-W values of one numeric parameter position, with rank queries.
class QuantileWindow {
 public:
  explicit QuantileWindow(size_t max_size) : max_size_(max_size) {}

  void push(double v);
  size_t size() const { return ring_.size(); }
  std::optional<double> threshold(double q) const;

 private:
  size_t max_size_;
  std::deque<double> ring_;
  std::vector<double> sorted_;
};

// Flags blocks whose string parameters contain an abnormal word or whose
// numeric parameters exceed the running quantile of their (pattern, position)
// slot. Values are tested against the threshold as it stood before them, then
// added, so a decision never depends on the value being judged.
class SymptomSampler {
 public:
  explicit SymptomSampler(const SamplerConfig& cfg);

  SampleDecision check(const ParamBlock& block);

 private:
  double quantile_;
  size_t window_;
  size_t min_window_;
  std::vector<std::string> words_lower_;
  std::unordered_map<std::string, QuantileWindow> windows_;
};

// Samples a pattern occurrence with probability min(1, c / frequency), so
// rare topologies are kept at a higher rate than common ones.
class EdgeCaseSampler {
 public:
  EdgeCaseSampler(double c, uint64_t seed);

  SampleDecision decide(const std::string& topo_id, uint64_t match_count, uint64_t total_matches);
  static double probability(double c, uint64_t match_count, uint64_t total_matches);

 private:
  double c_;
  std::mt19937_64 rng_;
};

// Head decision as a pure function of (seed, trace_id): every agent computes
// the same answer without coordination.
bool head_sampled(uint64_t seed, std::string_view trace_id, double rate);

bool contains_word_ci(std::string_view haystack, std::string_view needle_lower);

}  // namespace mint
