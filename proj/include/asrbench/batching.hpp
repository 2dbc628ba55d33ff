#pragma once

#include <functional>
#include <span>
#include <vector>

#include "asrbench/adapters.hpp"

namespace asrbench {

struct BatchAttempt {
  std::size_t rung = 0;        // ladder value active for this attempt
  std::size_t batch_size = 0;  // requests submitted (smaller for the remainder)
  bool succeeded = false;
  double seconds = 0.0;        // adapter call time, measured on adapter.clock()
};

struct BatchingOutcome {
  std::vector<TranscriptionResponse> responses;  // request order
  std::vector<BatchAttempt> attempts;
  double call_seconds = 0.0;  // all adapter calls, rejected attempts included
  std::size_t settled_rung = 0;
};

// Invoked after each successful batch with its requests, the matching
// responses (same order) and the call time.
using BatchCallback = std::function<void(std::span<const TranscriptionRequest>,
                                         std::span<const TranscriptionResponse>, double)>;

/// Submits `requests` in ladder-sized batches. A capacity error permanently
/// steps down one rung and resubmits the unfinished work at the new size; a
/// capacity error at rung 1 is fatal ("sample does not fit"). Every other
/// adapter error propagates unchanged after the samples completed so far have
/// been reported through `on_batch`.
BatchingOutcome with_adaptive_batching(Adapter& adapter, std::span<const TranscriptionRequest> requests,
                                       const AdapterConfig& config, const BatchCallback& on_batch = {});

}  // namespace asrbench
