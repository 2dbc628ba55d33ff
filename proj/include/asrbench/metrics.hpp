#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace asrbench {

struct EditCounts {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t ref_len = 0;

  std::size_t errors() const noexcept { return substitutions + deletions + insertions; }
  EditCounts& operator+=(const EditCounts& other) noexcept;
  friend EditCounts operator+(EditCounts a, const EditCounts& b) noexcept { return a += b; }
  bool operator==(const EditCounts&) const = default;
};

// Stored as a ratio; presentation layers scale to percent.
struct WerScore {
  double value = 0.0;
  std::size_t numerator = 0;
  std::size_t denominator = 0;

  double percent() const noexcept { return value * 100.0; }
  bool operator==(const WerScore&) const = default;
};

struct RtfxMeasurement {
  double audio_seconds = 0.0;
  double transcription_seconds = 0.0;
  double rtfx = 0.0;

  bool operator==(const RtfxMeasurement&) const = default;
};

/// Minimum-edit word alignment with unit costs.
///
/// The traceback prefers substitution (or match) over deletion over insertion,
/// so the S/D/I split is deterministic for a given pair.
EditCounts align(std::span<const std::string> ref, std::span<const std::string> hyp);

// Pooled (micro-averaged) WER. Throws MetricError when the pool holds no
// reference tokens.
WerScore corpus_wer(std::span<const EditCounts> counts);

// audio / transcription time. Throws MetricError("invalid duration") unless
// both are finite and positive.
RtfxMeasurement rtfx(double audio_seconds, double transcription_seconds);

}  // namespace asrbench
