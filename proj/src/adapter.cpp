#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <mutex>
#include <unordered_map>

#include <unistd.h>

#include <fmt/format.h>

#include "asrbench/adapters.hpp"
#include "asrbench/error.hpp"
#include "json.hpp"

namespace asrbench {

std::string_view to_string(AdapterKind kind) {
  switch (kind) {
    case AdapterKind::mock: return "mock";
    case AdapterKind::subprocess: return "subprocess";
    case AdapterKind::http: return "http";
  }
  return "mock";
}

std::vector<std::size_t> default_backoff_ladder() { return {64, 48, 32, 16, 8, 4, 2, 1}; }

std::vector<std::size_t> complete_ladder(std::vector<std::size_t> ladder) {
  if (ladder.empty()) return ladder;
  std::size_t last = ladder.back();
  while (last > 1) {
    last /= 2;
    ladder.push_back(last);
  }
  return ladder;
}

std::vector<std::size_t> ladder_from(std::size_t batch_size) {
  std::vector<std::size_t> ladder{batch_size};
  for (std::size_t rung : default_backoff_ladder()) {
    if (rung < batch_size) ladder.push_back(rung);
  }
  return ladder;
}

void AdapterConfig::validate_batching() const {
  if (backoff_ladder.empty() || backoff_ladder.back() != 1) {
    throw ConfigError("backoff ladder must end at 1");
  }
  for (std::size_t i = 1; i < backoff_ladder.size(); ++i) {
    if (backoff_ladder[i] >= backoff_ladder[i - 1]) throw ConfigError("backoff ladder must be strictly descending");
  }
  if (std::find(backoff_ladder.begin(), backoff_ladder.end(), initial_batch_size) == backoff_ladder.end()) {
    throw ConfigError(fmt::format("initial batch size {} is not a ladder rung", initial_batch_size));
  }
}

void AdapterConfig::validate() const {
  validate_batching();
  if (!(timeout_s > 0.0)) throw ConfigError("timeout must be positive");
  if (endpoint_or_cmd.empty()) throw ConfigError("adapter endpoint or command is empty");
}

std::string AdapterConfig::canonical_json() const {
  nlohmann::ordered_json j;
  j["kind"] = std::string(to_string(kind));
  j["endpoint_or_cmd"] = endpoint_or_cmd;
  j["initial_batch_size"] = initial_batch_size;
  j["backoff_ladder"] = backoff_ladder;
  j["timeout_s"] = timeout_s;
  return j.dump();
}

AdapterConfig AdapterConfig::parse(std::string_view text) {
  AdapterConfig config;
  if (text.starts_with("http://") || text.starts_with("https://")) {
    config.kind = AdapterKind::http;
    config.endpoint_or_cmd = std::string(text);
    return config;
  }
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ConfigError(fmt::format("adapter must be mock:PATH, subprocess:CMD or http:URL, got \"{}\"", text));
  }
  const std::string_view scheme = text.substr(0, colon);
  const std::string_view rest = text.substr(colon + 1);
  if (scheme == "mock") {
    config.kind = AdapterKind::mock;
  } else if (scheme == "subprocess") {
    config.kind = AdapterKind::subprocess;
  } else if (scheme == "http") {
    config.kind = AdapterKind::http;
  } else {
    throw ConfigError(fmt::format("unknown adapter kind: {}", scheme));
  }
  if (rest.empty()) throw ConfigError(fmt::format("adapter {} needs a target", scheme));
  config.endpoint_or_cmd = std::string(rest);
  return config;
}

std::unique_ptr<Adapter> make_adapter(const AdapterConfig& config) {
  switch (config.kind) {
    case AdapterKind::mock: {
      const std::filesystem::path path(config.endpoint_or_cmd);
      return std::make_unique<MockAdapter>(MockFixture::load(path), path.stem().string());
    }
    case AdapterKind::subprocess:
      return std::make_unique<SubprocessAdapter>(config.endpoint_or_cmd, config.timeout_s);
    case AdapterKind::http:
      return std::make_unique<HttpAdapter>(config.endpoint_or_cmd, config.timeout_s);
  }
  throw ConfigError("unknown adapter kind");
}

std::vector<TranscriptionResponse> associate_responses(std::span<const TranscriptionRequest> requests,
                                                       std::vector<TranscriptionResponse> responses) {
  std::unordered_map<std::string, std::size_t> slot;
  slot.reserve(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i) slot.emplace(requests[i].sample_id, i);

  std::vector<std::optional<TranscriptionResponse>> ordered(requests.size());
  for (auto& r : responses) {
    const auto it = slot.find(r.sample_id);
    if (it == slot.end()) throw ProtocolError(fmt::format("response for unknown id: {}", r.sample_id));
    auto& cell = ordered[it->second];
    if (cell) throw ProtocolError(fmt::format("duplicate response for id: {}", r.sample_id));
    cell = std::move(r);
  }
  std::vector<TranscriptionResponse> out;
  out.reserve(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (!ordered[i]) throw ProtocolError(fmt::format("missing response for id: {}", requests[i].sample_id));
    out.push_back(std::move(*ordered[i]));
  }
  return out;
}

namespace {

void put_le(std::string& out, std::uint32_t value, int bytes) {
  for (int i = 0; i < bytes; ++i) out += static_cast<char>((value >> (8 * i)) & 0xFF);
}

std::string silent_wav(std::uint32_t sample_rate, std::uint32_t samples) {
  const std::uint32_t data_bytes = samples * 2;
  std::string wav = "RIFF";
  put_le(wav, 36 + data_bytes, 4);
  wav += "WAVEfmt ";
  put_le(wav, 16, 4);               // fmt chunk size
  put_le(wav, 1, 2);                // PCM
  put_le(wav, 1, 2);                // mono
  put_le(wav, sample_rate, 4);
  put_le(wav, sample_rate * 2, 4);  // byte rate
  put_le(wav, 2, 2);                // block align
  put_le(wav, 16, 2);               // bits per sample
  wav += "data";
  put_le(wav, data_bytes, 4);
  wav.append(data_bytes, '\0');
  return wav;
}

}  // namespace

const std::filesystem::path& warmup_audio_path() {
  static std::once_flag once;
  static std::filesystem::path path;
  std::call_once(once, [] {
    const auto dir = std::filesystem::temp_directory_path();
    path = dir / "asrbench-silence-1s-16k.wav";
    const auto tmp = dir / fmt::format("asrbench-silence-1s-16k.wav.{}", ::getpid());
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      const std::string wav = silent_wav(16000, 16000);
      out.write(wav.data(), static_cast<std::streamsize>(wav.size()));
      if (!out) throw IoError(fmt::format("cannot write warmup audio: {}", tmp.string()));
    }
    std::filesystem::rename(tmp, path);
  });
  return path;
}

double warmup(Adapter& adapter) {
  const TranscriptionRequest request{"__warmup__", warmup_audio_path().string(), std::nullopt, 1.0};
  return time_call(adapter.clock(), [&] {
    adapter.prepare();
    (void)adapter.transcribe_batch(std::span(&request, 1));
  });
}

}  // namespace asrbench
