#include <fstream>
#include <sstream>

#include <unistd.h>

#include <fmt/format.h>

#include "asrbench/error.hpp"
#include "asrbench/runner.hpp"
#include "json.hpp"

namespace asrbench {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

template <typename T>
ordered_json opt(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::string safe_component(std::string_view id) {
  std::string out;
  for (char c : id) {
    if (c == '/' || c == '\\') {
      out += "__";
    } else {
      out += c;
    }
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

}  // namespace

std::string result_to_json(const EvalResult& r) {
  ordered_json j;
  j["model_id"] = r.model_id;
  j["dataset_id"] = r.dataset_id;
  j["track"] = std::string(to_string(r.track));
  j["language"] = opt(r.language);
  ordered_json samples = ordered_json::array();
  for (const auto& s : r.per_sample) {
    ordered_json e;
    e["sample_id"] = s.sample_id;
    e["language"] = s.language;
    e["ref_raw"] = s.ref_raw;
    e["hyp_raw"] = s.hyp_raw;
    e["ref_norm_tokens"] = s.ref_norm_tokens;
    e["hyp_norm_tokens"] = s.hyp_norm_tokens;
    e["edit_counts"] = {{"substitutions", s.edit_counts.substitutions},
                        {"deletions", s.edit_counts.deletions},
                        {"insertions", s.edit_counts.insertions},
                        {"ref_len", s.edit_counts.ref_len}};
    e["audio_s"] = s.audio_s;
    e["wall_s"] = s.wall_s;
    e["backend_infer_ms"] = opt(s.backend_infer_ms);
    samples.push_back(std::move(e));
  }
  j["per_sample"] = std::move(samples);
  if (r.wer) {
    j["wer"] = {{"value", r.wer->value}, {"numerator", r.wer->numerator}, {"denominator", r.wer->denominator}};
  } else {
    j["wer"] = nullptr;
  }
  if (r.rtfx) {
    j["rtfx"] = {{"audio_seconds", r.rtfx->audio_seconds},
                 {"transcription_seconds", r.rtfx->transcription_seconds},
                 {"rtfx", r.rtfx->rtfx}};
  } else {
    j["rtfx"] = nullptr;
  }
  j["skipped"] = r.skipped;
  j["rules_id"] = r.rules_id;
  j["config_digest"] = r.config_digest;
  j["status"] = std::string(to_string(r.status));
  j["error"] = opt(r.error);
  j["warmup_s"] = r.warmup_s;
  j["started_at"] = r.started_at;
  j["finished_at"] = r.finished_at;
  return j.dump(2) + "\n";
}

EvalResult result_from_json(std::string_view text, std::string_view source_name) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ReportError(fmt::format("{}: not valid JSON: {}", source_name, e.what()));
  }
  try {
    if (!j.is_object() || !j.contains("model_id") || !j.contains("dataset_id") || !j.contains("per_sample")) {
      throw ReportError(fmt::format("{}: not an evaluation result", source_name));
    }
    EvalResult r;
    r.model_id = j.at("model_id").get<std::string>();
    r.dataset_id = j.at("dataset_id").get<std::string>();
    try {
      r.track = parse_track(j.at("track").get<std::string>());
    } catch (const ManifestError& e) {
      throw ReportError(fmt::format("{}: {}", source_name, e.what()));
    }
    if (j.contains("language") && !j["language"].is_null()) r.language = j["language"].get<std::string>();
    for (const auto& e : j.at("per_sample")) {
      SampleRecord s;
      s.sample_id = e.at("sample_id").get<std::string>();
      s.language = e.value("language", "");
      s.ref_raw = e.at("ref_raw").get<std::string>();
      s.hyp_raw = e.at("hyp_raw").get<std::string>();
      s.ref_norm_tokens = e.at("ref_norm_tokens").get<std::vector<std::string>>();
      s.hyp_norm_tokens = e.at("hyp_norm_tokens").get<std::vector<std::string>>();
      const auto& c = e.at("edit_counts");
      s.edit_counts = {c.at("substitutions").get<std::size_t>(), c.at("deletions").get<std::size_t>(),
                       c.at("insertions").get<std::size_t>(), c.at("ref_len").get<std::size_t>()};
      s.audio_s = e.at("audio_s").get<double>();
      s.wall_s = e.at("wall_s").get<double>();
      if (e.contains("backend_infer_ms") && !e["backend_infer_ms"].is_null()) {
        s.backend_infer_ms = e["backend_infer_ms"].get<double>();
      }
      r.per_sample.push_back(std::move(s));
    }
    if (const auto& w = j.at("wer"); !w.is_null()) {
      r.wer = WerScore{w.at("value").get<double>(), w.at("numerator").get<std::size_t>(),
                       w.at("denominator").get<std::size_t>()};
    }
    if (const auto& x = j.at("rtfx"); !x.is_null()) {
      r.rtfx = RtfxMeasurement{x.at("audio_seconds").get<double>(), x.at("transcription_seconds").get<double>(),
                               x.at("rtfx").get<double>()};
    }
    r.skipped = j.at("skipped").get<std::size_t>();
    r.rules_id = j.value("rules_id", "");
    r.config_digest = j.at("config_digest").get<std::string>();
    r.status = parse_run_status(j.at("status").get<std::string>());
    if (j.contains("error") && !j["error"].is_null()) r.error = j["error"].get<std::string>();
    r.warmup_s = j.value("warmup_s", 0.0);
    r.started_at = j.value("started_at", "");
    r.finished_at = j.value("finished_at", "");
    return r;
  } catch (const json::exception& e) {
    throw ReportError(fmt::format("{}: malformed result: {}", source_name, e.what()));
  }
}

std::filesystem::path result_path(const EvalResult& result, const std::filesystem::path& out_dir) {
  std::string file = safe_component(result.dataset_id);
  if (result.language) file += "." + safe_component(*result.language);
  return out_dir / safe_component(result.model_id) / (file + ".json");
}

std::filesystem::path persist_result(const EvalResult& result, const std::filesystem::path& out_dir) {
  const auto path = result_path(result, out_dir);
  const auto dir = path.parent_path();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create results directory {}: {}", dir.string(), ec.message()));

  const auto tmp = dir / fmt::format(".{}.{}.tmp", path.filename().string(), ::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot write to results directory {}", dir.string()));
    const std::string text = result_to_json(result);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp, ec);
      throw IoError(fmt::format("failed writing results in {}", dir.string()));
    }
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw IoError(fmt::format("cannot replace {} in {}: {}", path.filename().string(), dir.string(), ec.message()));
  }
  return path;
}

EvalResult load_result(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read result file: {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return result_from_json(ss.str(), path.string());
}

}  // namespace asrbench
