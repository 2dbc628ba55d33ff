#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace asrbench {

class NormalizationRules;

enum class Track { leaderboard, multilingual, longform };

std::string_view to_string(Track track);
// Throws ManifestError on an unknown name.
Track parse_track(std::string_view name);

// Audio longer than this (strictly) belongs to the long-form track.
inline constexpr double kLongformThresholdSeconds = 30.0;

struct Sample {
  std::string id;
  std::string audio_path;  // as written in the manifest
  double duration_s = 0.0;
  std::string reference;
  std::string language;
  std::string dataset_id;
  std::set<std::string> style_tags;

  bool operator==(const Sample&) const = default;
};

struct DatasetManifest {
  std::string dataset_id;
  std::set<Track> tracks;
  std::string license;
  // Optional descriptive metadata (source, style, transcription conventions).
  std::string source;
  std::set<std::string> style;
  std::string transcriptions;
  std::vector<Sample> samples;
  // Directory relative audio paths resolve against; not serialized.
  std::filesystem::path base_dir;

  double total_duration_h() const;
  std::filesystem::path resolve_audio(const Sample& sample) const;
  bool operator==(const DatasetManifest& other) const;
};

/// Loads a line-delimited JSON manifest: one header object followed by one
/// object per sample. Errors carry the 1-based line number.
DatasetManifest load_manifest(const std::filesystem::path& path);
DatasetManifest parse_manifest(std::istream& in, std::string_view source_name = "<manifest>");
void serialize_manifest(const DatasetManifest& manifest, std::ostream& out);

bool is_longform(const Sample& sample) noexcept;

enum class LongformPolicy {
  require,  // a short sample in a long-form selection is an error
  filter,   // short samples are dropped from a long-form selection
};

/// Samples registered for `track`, optionally restricted to one language,
/// in manifest order.
std::vector<Sample> select(const DatasetManifest& manifest, Track track,
                           const std::optional<std::string>& language = std::nullopt,
                           LongformPolicy policy = LongformPolicy::require);

enum class IssueSeverity { error, warning };

struct ValidationIssue {
  IssueSeverity severity = IssueSeverity::error;
  std::string sample_id;
  std::string kind;  // missing_audio, non_positive_duration, empty_reference, empty_after_normalization
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool empty() const noexcept { return issues.empty(); }
  std::size_t error_count() const noexcept;
  std::size_t warning_count() const noexcept;
};

// `rules` enables the normalized-empty-reference warning; multilingual-only
// manifests are checked in basic mode.
ValidationReport validate_manifest(const DatasetManifest& manifest, const NormalizationRules* rules = nullptr);

}  // namespace asrbench
