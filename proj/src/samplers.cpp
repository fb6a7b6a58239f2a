#include "mint/samplers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "mint/common.hpp"

namespace mint {

std::optional<double> nearest_rank(const std::vector<double>& window, double q) {
  if (window.empty()) return std::nullopt;
  std::vector<double> sorted = window;
  std::sort(sorted.begin(), sorted.end());
  const size_t n = sorted.size();
  size_t rank = static_cast<size_t>(std::ceil(q * static_cast<double>(n)));
  if (rank == 0) rank = 1;
  if (rank > n) rank = n;
  return sorted[rank - 1];
}

void QuantileWindow::push(double v) {
  if (ring_.size() == max_size_) {
    const double oldest = ring_.front();
    ring_.pop_front();
    sorted_.erase(std::lower_bound(sorted_.begin(), sorted_.end(), oldest));
  }
  ring_.push_back(v);
  sorted_.insert(std::upper_bound(sorted_.begin(), sorted_.end(), v), v);
}

std::optional<double> QuantileWindow::threshold(double q) const {
  if (sorted_.empty()) return std::nullopt;
  const size_t n = sorted_.size();
  size_t rank = static_cast<size_t>(std::ceil(q * static_cast<double>(n)));
  if (rank == 0) rank = 1;
  if (rank > n) rank = n;
  return sorted_[rank - 1];
}

bool contains_word_ci(std::string_view haystack, std::string_view needle_lower) {
  if (needle_lower.empty() || haystack.size() < needle_lower.size()) return false;
  for (size_t i = 0; i + needle_lower.size() <= haystack.size(); ++i) {
    bool hit = true;
    for (size_t j = 0; j < needle_lower.size(); ++j) {
      if (std::tolower(static_cast<unsigned char>(haystack[i + j])) !=
          static_cast<unsigned char>(needle_lower[j])) {
        hit = false;
        break;
      }
    }
    if (hit) return true;
  }
  return false;
}

SymptomSampler::SymptomSampler(const SamplerConfig& cfg)
    : quantile_(cfg.quantile), window_(cfg.window), min_window_(cfg.min_window) {
  for (const std::string& w : cfg.abnormal_words) {
    std::string lower = w;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (!lower.empty()) words_lower_.push_back(std::move(lower));
  }
}

SampleDecision SymptomSampler::check(const ParamBlock& block) {
  SampleDecision d;
  for (const SpanParams& sp : block.spans) {
    for (size_t pos = 0; pos < sp.params.size(); ++pos) {
      const ParamValue& pv = sp.params[pos];
      if (pv.kind == ParamValue::Kind::Fill) {
        for (const std::string& w : words_lower_) {
          if (contains_word_ci(pv.fill, w)) {
            d.sampled = true;
            d.reasons.push_back("word \"" + w + "\" in span " + sp.span_id + " param " +
                                std::to_string(pos));
          }
        }
        continue;
      }
      if (pv.kind != ParamValue::Kind::Residual && pv.kind != ParamValue::Kind::RawNumber)
        continue;
      std::string key = sp.pattern_id;
      key += '\x1f';
      key += std::to_string(pos);
      auto it = windows_.find(key);
      if (it == windows_.end())
        it = windows_.emplace(std::move(key), QuantileWindow(window_)).first;
      QuantileWindow& w = it->second;
      if (w.size() >= min_window_) {
        const auto t = w.threshold(quantile_);
        if (t && pv.num > *t) {
          d.sampled = true;
          d.reasons.push_back("outlier in span " + sp.span_id + " param " + std::to_string(pos) +
                              " above p" + std::to_string(static_cast<int>(quantile_ * 100)));
        }
      }
      w.push(pv.num);
    }
  }
  return d;
}

double EdgeCaseSampler::probability(double c, uint64_t match_count, uint64_t total_matches) {
  if (total_matches == 0 || match_count == 0) return 1.0;
  const double freq = static_cast<double>(match_count) / static_cast<double>(total_matches);
  return std::min(1.0, c / freq);
}

EdgeCaseSampler::EdgeCaseSampler(double c, uint64_t seed) : c_(c), rng_(seed) {}

SampleDecision EdgeCaseSampler::decide(const std::string& topo_id, uint64_t match_count,
                                       uint64_t total_matches) {
  const double p = probability(c_, match_count, total_matches);
  // One draw per decision, taken unconditionally, keeps the stream aligned
  // with the decision sequence whatever p is.
  const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  SampleDecision d;
  if (u < p) {
    d.sampled = true;
    d.reasons.push_back("edge case topo " + topo_id);
  }
  return d;
}

bool head_sampled(uint64_t seed, std::string_view trace_id, double rate) {
  if (rate <= 0.0) return false;
  if (rate >= 1.0) return true;
  return hash_unit(seed ^ 0x68656164u, trace_id) < rate;
}

}  // namespace mint
