#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mint {

// Synthetic retail traffic over a fixed universe of 4 trace shapes built from
// 10 span templates, spread over up to 4 agents. Everything is a pure
// function of (spec, trace index): regenerating a trace always yields the
// same bytes, which is what the reconstruction oracles compare against.
struct WorkloadSpec {
  uint64_t trace_count = 1000;
  uint32_t agent_count = 4;   // 1..4; templates fold onto fewer agents by modulo
  double anomaly_rate = 0.0;  // traces given an abnormal word + high-end numeric
  double rare_rate = 0.10;    // share of the rare restock shape
  uint64_t seed = 1;
  uint32_t interleave = 16;  // traces in flight at once in the stream
};

bool validate_spec(const WorkloadSpec& spec, std::string* error);

struct TraceGroundTruth {
  std::string trace_id;
  uint32_t template_id = 0;
  bool anomaly = false;
  std::vector<std::string> agents;  // agents hosting spans, sorted
  uint32_t span_count = 0;
};

std::string truth_to_json(const TraceGroundTruth& t);
std::optional<TraceGroundTruth> truth_from_json(std::string_view line);

// One trace in stream form: span records in emission order, then one
// end-of-trace marker per hosting agent.
struct GeneratedTrace {
  TraceGroundTruth truth;
  std::vector<std::string> lines;
};

class WorkloadGenerator {
 public:
  explicit WorkloadGenerator(WorkloadSpec spec) : spec_(spec) {}

  const WorkloadSpec& spec() const { return spec_; }

  GeneratedTrace make_trace(uint64_t index) const;
  std::string trace_id(uint64_t index) const;

  // Emits the whole corpus, round-robining `interleave` traces so records of
  // different traces overlap the way concurrent requests would. truth_sink
  // fires once per trace in index order.
  void generate(const std::function<void(std::string_view)>& sink,
                const std::function<void(const TraceGroundTruth&)>& truth_sink) const;

  // Stream records of the corpus, counted without keeping it.
  uint64_t count_records() const;

 private:
  WorkloadSpec spec_;
};

}  // namespace mint
