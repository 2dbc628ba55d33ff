#include "asrbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "asrbench/error.hpp"

namespace asrbench {

EditCounts& EditCounts::operator+=(const EditCounts& other) noexcept {
  substitutions += other.substitutions;
  deletions += other.deletions;
  insertions += other.insertions;
  ref_len += other.ref_len;
  return *this;
}

EditCounts align(std::span<const std::string> ref, std::span<const std::string> hyp) {
  const std::size_t m = ref.size();
  const std::size_t n = hyp.size();
  const std::size_t width = n + 1;
  std::vector<std::size_t> cost((m + 1) * width);
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return cost[i * width + j]; };

  for (std::size_t i = 0; i <= m; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= n; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      const std::size_t diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  EditCounts counts;
  counts.ref_len = m;
  std::size_t i = m;
  std::size_t j = n;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (at(i, j) == at(i - 1, j - 1) + (same ? 0 : 1)) {
        if (!same) ++counts.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ++counts.deletions;
      --i;
    } else {
      ++counts.insertions;
      --j;
    }
  }
  return counts;
}

WerScore corpus_wer(std::span<const EditCounts> counts) {
  EditCounts total;
  for (const auto& c : counts) total += c;
  if (total.ref_len == 0) throw MetricError("undefined WER: zero reference tokens");
  WerScore score;
  score.numerator = total.errors();
  score.denominator = total.ref_len;
  score.value = static_cast<double>(score.numerator) / static_cast<double>(score.denominator);
  return score;
}

RtfxMeasurement rtfx(double audio_seconds, double transcription_seconds) {
  if (!(audio_seconds > 0.0) || !(transcription_seconds > 0.0) || !std::isfinite(audio_seconds) ||
      !std::isfinite(transcription_seconds)) {
    throw MetricError("invalid duration");
  }
  return {audio_seconds, transcription_seconds, audio_seconds / transcription_seconds};
}

}  // namespace asrbench
