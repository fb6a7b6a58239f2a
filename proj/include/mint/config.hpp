#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "mint/samplers.hpp"
#include "mint/span_parser.hpp"
#include "mint/workload.hpp"

namespace mint {

struct AgentSettings {
  size_t params_capacity_bytes = 4u << 20;
  size_t bloom_capacity_bytes = 4096;
  double bloom_fpp = 0.01;
  uint64_t idle_gap = 1000;
  bool parallel_warmup = true;
};

struct CollectorSettings {
  uint64_t report_interval = 5000;  // records between pattern deltas
  bool full_resend = false;
};

struct RunSettings {
  bool query_sweep = false;  // query every ingested trace after the run
};

// All tunables, grouped as the config file groups them. Defaults reproduce
// the standard pipeline; a file only needs the keys it changes.
struct Config {
  WorkloadSpec workload;
  ParserConfig parser;
  AgentSettings agent;
  SamplerConfig sampler;
  CollectorSettings collector;
  RunSettings run;

  // One seed to drive both generation and sampling decisions.
  void apply_seed(uint64_t seed) {
    workload.seed = seed;
    sampler.rng_seed = seed;
  }

  // key=value sections; unknown sections or keys are errors so typos
  // cannot silently fall back to defaults.
  static std::optional<Config> load(const std::string& path, std::string* error);
  static std::optional<Config> parse(std::string_view text, std::string* error);
};

}  // namespace mint
