#include "asrbench/batching.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "asrbench/error.hpp"

namespace asrbench {

BatchingOutcome with_adaptive_batching(Adapter& adapter, std::span<const TranscriptionRequest> requests,
                                       const AdapterConfig& config, const BatchCallback& on_batch) {
  config.validate_batching();
  const auto& ladder = config.backoff_ladder;
  std::size_t rung = static_cast<std::size_t>(
      std::find(ladder.begin(), ladder.end(), config.initial_batch_size) - ladder.begin());

  BatchingOutcome outcome;
  outcome.responses.reserve(requests.size());
  const Clock& clock = adapter.clock();
  std::size_t pos = 0;
  while (pos < requests.size()) {
    const std::size_t size = std::min(ladder[rung], requests.size() - pos);
    const auto batch = requests.subspan(pos, size);
    std::vector<TranscriptionResponse> raw;
    const double start = clock.monotonic_seconds();
    try {
      raw = adapter.transcribe_batch(batch);
    } catch (const CapacityError& e) {
      const double elapsed = clock.monotonic_seconds() - start;
      outcome.attempts.push_back({ladder[rung], size, false, elapsed});
      outcome.call_seconds += elapsed;
      if (size == 1 || rung + 1 == ladder.size()) {
        throw FatalAdapterError(fmt::format("sample does not fit: {} ({})", batch.front().sample_id, e.what()));
      }
      // A remainder smaller than the next rung is retried at that rung too;
      // never retry the same size twice.
      ++rung;
      while (rung + 1 < ladder.size() && ladder[rung] >= size) ++rung;
      continue;
    }
    const double elapsed = clock.monotonic_seconds() - start;
    outcome.attempts.push_back({ladder[rung], size, true, elapsed});
    outcome.call_seconds += elapsed;
    auto ordered = associate_responses(batch, std::move(raw));
    if (on_batch) on_batch(batch, ordered, elapsed);
    for (auto& r : ordered) outcome.responses.push_back(std::move(r));
    pos += size;
  }
  outcome.settled_rung = ladder[rung];
  return outcome;
}

}  // namespace asrbench
