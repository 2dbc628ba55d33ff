#include "asrbench/corpus.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <fmt/format.h>

#include "asrbench/error.hpp"
#include "asrbench/normalizer.hpp"
#include "json.hpp"

namespace asrbench {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void line_error(std::string_view source, std::size_t line, std::string_view what) {
  throw ManifestError(fmt::format("{}:{}: {}", source, line, what));
}

std::string required_string(const json& obj, const char* key, std::string_view source, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) line_error(source, line, fmt::format("missing string field \"{}\"", key));
  return it->get<std::string>();
}

std::string optional_string(const json& obj, const char* key, std::string_view source, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_string()) line_error(source, line, fmt::format("field \"{}\" must be a string", key));
  return it->get<std::string>();
}

std::set<std::string> optional_string_set(const json& obj, const char* key, std::string_view source,
                                          std::size_t line) {
  std::set<std::string> out;
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return out;
  if (!it->is_array()) line_error(source, line, fmt::format("field \"{}\" must be an array of strings", key));
  for (const auto& v : *it) {
    if (!v.is_string()) line_error(source, line, fmt::format("field \"{}\" must be an array of strings", key));
    out.insert(v.get<std::string>());
  }
  return out;
}

}  // namespace

std::string_view to_string(Track track) {
  switch (track) {
    case Track::leaderboard: return "leaderboard";
    case Track::multilingual: return "multilingual";
    case Track::longform: return "longform";
  }
  return "leaderboard";
}

Track parse_track(std::string_view name) {
  if (name == "leaderboard") return Track::leaderboard;
  if (name == "multilingual") return Track::multilingual;
  if (name == "longform") return Track::longform;
  throw ManifestError(fmt::format("unknown track: {}", name));
}

double DatasetManifest::total_duration_h() const {
  double seconds = 0.0;
  for (const auto& s : samples) seconds += s.duration_s;
  return seconds / 3600.0;
}

std::filesystem::path DatasetManifest::resolve_audio(const Sample& sample) const {
  std::filesystem::path p(sample.audio_path);
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

bool DatasetManifest::operator==(const DatasetManifest& other) const {
  return dataset_id == other.dataset_id && tracks == other.tracks && license == other.license &&
         source == other.source && style == other.style && transcriptions == other.transcriptions &&
         samples == other.samples;
}

DatasetManifest parse_manifest(std::istream& in, std::string_view source_name) {
  DatasetManifest manifest;
  std::unordered_set<std::string> seen;
  bool have_header = false;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      line_error(source_name, number, fmt::format("malformed JSON: {}", e.what()));
    }
    if (!obj.is_object()) line_error(source_name, number, "expected a JSON object");

    if (!have_header) {
      manifest.dataset_id = required_string(obj, "dataset_id", source_name, number);
      if (manifest.dataset_id.empty()) line_error(source_name, number, "dataset_id must be non-empty");
      const auto tracks = obj.find("tracks");
      if (tracks == obj.end() || !tracks->is_array() || tracks->empty()) {
        line_error(source_name, number, "header needs a non-empty \"tracks\" array");
      }
      for (const auto& t : *tracks) {
        if (!t.is_string()) line_error(source_name, number, "track names must be strings");
        try {
          manifest.tracks.insert(parse_track(t.get<std::string>()));
        } catch (const ManifestError& e) {
          line_error(source_name, number, e.what());
        }
      }
      manifest.license = optional_string(obj, "license", source_name, number);
      manifest.source = optional_string(obj, "source", source_name, number);
      manifest.style = optional_string_set(obj, "style", source_name, number);
      manifest.transcriptions = optional_string(obj, "transcriptions", source_name, number);
      have_header = true;
      continue;
    }

    Sample sample;
    sample.id = required_string(obj, "id", source_name, number);
    if (sample.id.empty()) line_error(source_name, number, "sample id must be non-empty");
    sample.audio_path = required_string(obj, "audio", source_name, number);
    const auto duration = obj.find("duration_s");
    if (duration == obj.end() || !duration->is_number() || !std::isfinite(duration->get<double>())) {
      line_error(source_name, number, "missing numeric field \"duration_s\"");
    }
    sample.duration_s = duration->get<double>();
    sample.reference = required_string(obj, "text", source_name, number);
    sample.language = required_string(obj, "language", source_name, number);
    if (sample.language.empty()) line_error(source_name, number, "language must be non-empty");
    const std::string sample_dataset = optional_string(obj, "dataset_id", source_name, number);
    if (!sample_dataset.empty() && sample_dataset != manifest.dataset_id) {
      line_error(source_name, number,
                 fmt::format("sample dataset_id \"{}\" does not match header \"{}\"", sample_dataset,
                             manifest.dataset_id));
    }
    sample.dataset_id = manifest.dataset_id;
    sample.style_tags = optional_string_set(obj, "style_tags", source_name, number);
    if (!seen.insert(sample.id).second) throw ManifestError(fmt::format("duplicate sample id: {}", sample.id));
    manifest.samples.push_back(std::move(sample));
  }
  if (!have_header) throw ManifestError(fmt::format("{}: missing header line", source_name));
  return manifest;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ManifestError(fmt::format("cannot read manifest: {}", path.string()));
  DatasetManifest manifest = parse_manifest(in, path.string());
  manifest.base_dir = path.parent_path();
  return manifest;
}

void serialize_manifest(const DatasetManifest& manifest, std::ostream& out) {
  ordered_json header;
  header["dataset_id"] = manifest.dataset_id;
  header["tracks"] = ordered_json::array();
  for (Track t : manifest.tracks) header["tracks"].push_back(std::string(to_string(t)));
  header["license"] = manifest.license;
  if (!manifest.source.empty()) header["source"] = manifest.source;
  if (!manifest.style.empty()) header["style"] = manifest.style;
  if (!manifest.transcriptions.empty()) header["transcriptions"] = manifest.transcriptions;
  out << header.dump() << '\n';
  for (const auto& s : manifest.samples) {
    ordered_json line;
    line["id"] = s.id;
    line["audio"] = s.audio_path;
    line["duration_s"] = s.duration_s;
    line["text"] = s.reference;
    line["language"] = s.language;
    if (!s.style_tags.empty()) line["style_tags"] = s.style_tags;
    out << line.dump() << '\n';
  }
}

bool is_longform(const Sample& sample) noexcept { return sample.duration_s > kLongformThresholdSeconds; }

std::vector<Sample> select(const DatasetManifest& manifest, Track track, const std::optional<std::string>& language,
                           LongformPolicy policy) {
  if (!manifest.tracks.contains(track)) {
    throw ManifestError(fmt::format("dataset not registered for track: {} ({})", manifest.dataset_id, to_string(track)));
  }
  std::vector<Sample> out;
  for (const auto& s : manifest.samples) {
    if (language && s.language != *language) continue;
    if (track == Track::longform && !is_longform(s)) {
      if (policy == LongformPolicy::filter) continue;
      throw ManifestError(fmt::format("sample {} ({} s) is not long-form (> {} s required)", s.id, s.duration_s,
                                      kLongformThresholdSeconds));
    }
    out.push_back(s);
  }
  return out;
}

std::size_t ValidationReport::error_count() const noexcept {
  std::size_t n = 0;
  for (const auto& i : issues) n += i.severity == IssueSeverity::error;
  return n;
}

std::size_t ValidationReport::warning_count() const noexcept { return issues.size() - error_count(); }

ValidationReport validate_manifest(const DatasetManifest& manifest, const NormalizationRules* rules) {
  ValidationReport report;
  std::optional<NormalizationRules> effective;
  if (rules != nullptr) {
    const bool multilingual_only = manifest.tracks == std::set<Track>{Track::multilingual};
    effective = multilingual_only ? rules->as_basic("mul") : *rules;
  }
  for (const auto& s : manifest.samples) {
    const auto audio = manifest.resolve_audio(s);
    std::error_code ec;
    if (!std::filesystem::is_regular_file(audio, ec)) {
      report.issues.push_back(
          {IssueSeverity::error, s.id, "missing_audio", fmt::format("audio file not found: {}", audio.string())});
    }
    if (!(s.duration_s > 0.0)) {
      report.issues.push_back({IssueSeverity::error, s.id, "non_positive_duration",
                               fmt::format("duration_s must be > 0, got {}", s.duration_s)});
    }
    if (s.reference.find_first_not_of(" \t\r\n") == std::string::npos) {
      report.issues.push_back({IssueSeverity::error, s.id, "empty_reference", "reference text is empty"});
    } else if (effective && normalize(s.reference, *effective).tokens.empty()) {
      report.issues.push_back({IssueSeverity::warning, s.id, "empty_after_normalization",
                               "reference normalizes to zero tokens; the sample will be skipped when scoring"});
    }
  }
  return report;
}

}  // namespace asrbench
