#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "asrbench/adapters.hpp"
#include "asrbench/corpus.hpp"
#include "asrbench/metrics.hpp"
#include "asrbench/normalizer.hpp"

namespace asrbench {

enum class RunStatus { completed, aborted };

std::string_view to_string(RunStatus status);
RunStatus parse_run_status(std::string_view name);

struct SampleRecord {
  std::string sample_id;
  std::string language;
  std::string ref_raw;
  std::string hyp_raw;
  std::vector<std::string> ref_norm_tokens;
  std::vector<std::string> hyp_norm_tokens;
  EditCounts edit_counts;
  double audio_s = 0.0;
  double wall_s = 0.0;  // this sample's share of its batch's call time
  std::optional<double> backend_infer_ms;

  bool operator==(const SampleRecord&) const = default;
};

struct EvalResult {
  std::string model_id;
  std::string dataset_id;
  Track track = Track::leaderboard;
  std::optional<std::string> language;
  std::vector<SampleRecord> per_sample;  // scored samples, manifest order
  std::optional<WerScore> wer;           // absent when nothing was scored
  std::optional<RtfxMeasurement> rtfx;   // absent when no time was measured
  std::size_t skipped = 0;               // references empty after normalization
  std::string rules_id;
  std::string config_digest;
  RunStatus status = RunStatus::completed;
  std::optional<std::string> error;
  double warmup_s = 0.0;
  std::string started_at;
  std::string finished_at;

  bool operator==(const EvalResult&) const = default;
};

struct RunOptions {
  std::string model_id;  // defaults to adapter.name() when empty
  std::optional<std::string> language;
  double warmup_s = 0.0;  // recorded only
  // When set, the result (complete or aborted) is written here.
  std::optional<std::filesystem::path> out_dir;
};

// sha256 over the rules id and the adapter config's canonical JSON.
std::string config_digest(const std::string& rules_id, const AdapterConfig& config);

// Rules a track scores with: `rules` for English tracks, basic mode for multilingual.
NormalizationRules rules_for_track(const NormalizationRules& rules, Track track,
                                   const std::optional<std::string>& language);

/// Transcribes and scores the samples `manifest` registers for `track`.
///
/// Adapter failures do not throw: the result comes back with status
/// `aborted`, the error message and whatever was scored before the failure.
/// Throws RunError("no samples for track") on an empty selection.
EvalResult run_eval(Adapter& adapter, const DatasetManifest& manifest, Track track,
                    const NormalizationRules& rules, const AdapterConfig& config, const RunOptions& options = {});

// `{out_dir}/{model}/{dataset}.json`, or `{dataset}.{language}.json` for a
// language-filtered run. '/' in the model id becomes "__".
std::filesystem::path result_path(const EvalResult& result, const std::filesystem::path& out_dir);

/// Writes the result atomically (temp file + rename). Throws IoError naming
/// the directory when it cannot be created or written.
std::filesystem::path persist_result(const EvalResult& result, const std::filesystem::path& out_dir);
EvalResult load_result(const std::filesystem::path& path);

std::string result_to_json(const EvalResult& result);
// Throws ReportError when the document is not a result.
EvalResult result_from_json(std::string_view text, std::string_view source_name = "<result>");

}  // namespace asrbench
