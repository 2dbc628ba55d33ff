#include "asrbench/runner.hpp"

#include <cmath>

#include <fmt/format.h>

#include "asrbench/batching.hpp"
#include "asrbench/digest.hpp"
#include "asrbench/error.hpp"

namespace asrbench {

std::string_view to_string(RunStatus status) {
  return status == RunStatus::completed ? "completed" : "aborted";
}

RunStatus parse_run_status(std::string_view name) {
  if (name == "completed") return RunStatus::completed;
  if (name == "aborted") return RunStatus::aborted;
  throw ReportError(fmt::format("unknown run status: {}", name));
}

std::string config_digest(const std::string& rules_id, const AdapterConfig& config) {
  return sha256_hex(rules_id + "\n" + config.canonical_json());
}

NormalizationRules rules_for_track(const NormalizationRules& rules, Track track,
                                   const std::optional<std::string>& language) {
  if (track == Track::multilingual) return rules.as_basic(language.value_or("mul"));
  return rules;
}

namespace {

struct Pending {
  const Sample* sample;
  NormalizedText reference;
};

}  // namespace

EvalResult run_eval(Adapter& adapter, const DatasetManifest& manifest, Track track,
                    const NormalizationRules& rules, const AdapterConfig& config, const RunOptions& options) {
  const Clock& clock = adapter.clock();
  EvalResult result;
  result.started_at = format_utc(clock.wall_now());
  result.model_id = options.model_id.empty() ? adapter.name() : options.model_id;
  result.dataset_id = manifest.dataset_id;
  result.track = track;
  result.language = options.language;
  result.warmup_s = options.warmup_s;

  const auto samples = select(manifest, track, options.language);
  if (samples.empty()) {
    throw RunError(fmt::format("no samples for track {} in {}", to_string(track), manifest.dataset_id));
  }
  const NormalizationRules scoring = rules_for_track(rules, track, options.language);
  result.rules_id = scoring.id();
  result.config_digest = config_digest(result.rules_id, config);

  std::vector<Pending> pending;
  std::vector<TranscriptionRequest> requests;
  for (const auto& s : samples) {
    NormalizedText ref = normalize(s.reference, scoring);
    if (ref.tokens.empty()) {
      ++result.skipped;
      continue;
    }
    requests.push_back({s.id, manifest.resolve_audio(s).string(),
                        s.language.empty() ? std::nullopt : std::optional<std::string>(s.language), s.duration_s});
    pending.push_back({&s, std::move(ref)});
  }

  double scored_call_seconds = 0.0;
  std::size_t next = 0;
  const BatchCallback record = [&](std::span<const TranscriptionRequest> batch,
                                   std::span<const TranscriptionResponse> responses, double seconds) {
    scored_call_seconds += seconds;
    const double share = seconds / static_cast<double>(batch.size());
    for (const auto& response : responses) {
      Pending& p = pending[next++];
      SampleRecord rec;
      rec.sample_id = p.sample->id;
      rec.language = p.sample->language;
      rec.ref_raw = p.sample->reference;
      rec.hyp_raw = response.hypothesis;
      rec.ref_norm_tokens = std::move(p.reference.tokens);
      rec.hyp_norm_tokens = normalize(response.hypothesis, scoring).tokens;
      rec.edit_counts = align(rec.ref_norm_tokens, rec.hyp_norm_tokens);
      rec.audio_s = p.sample->duration_s;
      rec.wall_s = share;
      rec.backend_infer_ms = response.backend_infer_ms;
      result.per_sample.push_back(std::move(rec));
    }
  };

  double call_seconds = 0.0;
  if (!requests.empty()) {
    try {
      call_seconds = with_adaptive_batching(adapter, requests, config, record).call_seconds;
    } catch (const AdapterError& e) {
      result.status = RunStatus::aborted;
      result.error = e.what();
      call_seconds = scored_call_seconds;
    }
  }

  if (!result.per_sample.empty()) {
    std::vector<EditCounts> counts;
    counts.reserve(result.per_sample.size());
    double audio = 0.0;
    for (const auto& r : result.per_sample) {
      counts.push_back(r.edit_counts);
      audio += r.audio_s;
    }
    result.wer = corpus_wer(counts);
    if (audio > 0.0 && call_seconds > 0.0 && std::isfinite(call_seconds)) result.rtfx = rtfx(audio, call_seconds);
  }
  result.finished_at = format_utc(clock.wall_now());
  if (options.out_dir) persist_result(result, *options.out_dir);
  return result;
}

}  // namespace asrbench
