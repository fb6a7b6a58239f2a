#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mint/span_parser.hpp"

namespace mint {

// Variable halves of one trace's spans on one agent, serialized once at
// creation; byte_size is the serialized size, so buffer limits act on the
// exact bytes that would travel.
struct ParamBlock {
  std::string trace_id;
  std::string agent_id;
  uint64_t created_at = 0;  // monotonic per agent
  std::vector<SpanParams> spans;
  std::string wire;

  size_t byte_size() const { return wire.size(); }

  static ParamBlock make(std::string trace_id, std::string agent_id, uint64_t created_at,
                         std::vector<SpanParams> spans);
};

std::string encode_param_block(const ParamBlock& b);
std::optional<ParamBlock> decode_param_block(std::string_view wire);

// Byte-bounded FIFO of parameter blocks.
class ParamsBuffer {
 public:
  explicit ParamsBuffer(size_t capacity_bytes) : capacity_(capacity_bytes) {}

  enum class PushError { None, BlockTooLarge };

  // Appends the block, then evicts oldest-first until the byte budget holds.
  // Evicted blocks are returned so the caller can record the data loss.
  PushError push(ParamBlock block, std::vector<ParamBlock>* evicted);

  // Removes and returns every resident block of the trace, oldest first.
  std::vector<ParamBlock> take(const std::string& trace_id);

  size_t current_bytes() const { return bytes_; }
  size_t capacity_bytes() const { return capacity_; }
  size_t block_count() const { return queue_.size(); }

 private:
  size_t capacity_;
  size_t bytes_ = 0;
  std::deque<ParamBlock> queue_;
};

}  // namespace mint
