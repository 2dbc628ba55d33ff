#include <charconv>
#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "asrbench/adapters.hpp"
#include "asrbench/error.hpp"

namespace asrbench {

MockFixture MockFixture::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read mock fixture: {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

MockFixture MockFixture::parse(std::string_view tsv, std::string_view source_name) {
  MockFixture fixture;
  std::size_t number = 0;
  while (!tsv.empty()) {
    ++number;
    const auto nl = tsv.find('\n');
    std::string_view line = tsv.substr(0, nl);
    tsv = nl == std::string_view::npos ? std::string_view{} : tsv.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;

    const auto tab = line.find('\t');
    const std::string_view key = line.substr(0, tab);
    const std::string_view value = tab == std::string_view::npos ? std::string_view{} : line.substr(tab + 1);
    auto bad = [&](std::string_view what) {
      return ConfigError(fmt::format("{}:{}: {}", source_name, number, what));
    };

    if (key.starts_with('@')) {
      if (key == "@max_batch") {
        std::size_t n = 0;
        const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
        if (ec != std::errc{} || p != value.data() + value.size() || n == 0) throw bad("max_batch must be a positive integer");
        fixture.max_batch = n;
      } else if (key == "@ms_per_audio_second") {
        double ms = 0.0;
        const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), ms);
        if (ec != std::errc{} || p != value.data() + value.size() || !(ms >= 0.0)) {
          throw bad("ms_per_audio_second must be a non-negative number");
        }
        fixture.ms_per_audio_second = ms;
      } else if (key == "@clock") {
        if (value == "virtual") {
          fixture.virtual_clock = true;
        } else if (value == "sleep") {
          fixture.virtual_clock = false;
        } else {
          throw bad("clock must be sleep or virtual");
        }
      } else if (key == "@fail_on") {
        fixture.fail_on.emplace(value);
      } else {
        throw bad(fmt::format("unknown fixture option {}", key));
      }
      continue;
    }
    if (tab == std::string_view::npos) throw bad("expected sample_id<TAB>hypothesis");
    fixture.hypotheses.insert_or_assign(std::string(key), std::string(value));
  }
  return fixture;
}

MockAdapter::MockAdapter(MockFixture fixture, std::string name)
    : fixture_(std::move(fixture)), name_(std::move(name)) {}

const Clock& MockAdapter::clock() const {
  if (fixture_.virtual_clock) return virtual_clock_;
  return steady_clock();
}

std::vector<TranscriptionResponse> MockAdapter::transcribe_batch(std::span<const TranscriptionRequest> requests) {
  invocations_.push_back(requests.size());
  if (fixture_.max_batch && requests.size() > *fixture_.max_batch) {
    throw CapacityError(fmt::format("batch of {} exceeds mock capacity {}", requests.size(), *fixture_.max_batch));
  }
  double audio = 0.0;
  std::vector<TranscriptionResponse> out;
  out.reserve(requests.size());
  for (const auto& r : requests) {
    if (fixture_.fail_on.contains(r.sample_id)) {
      throw FatalAdapterError(fmt::format("mock configured to fail on {}", r.sample_id));
    }
    audio += r.duration_s;
    const auto it = fixture_.hypotheses.find(r.sample_id);
    out.push_back({r.sample_id, it == fixture_.hypotheses.end() ? std::string{} : it->second, std::nullopt});
  }
  const double cost_s = audio * fixture_.ms_per_audio_second / 1000.0;
  if (fixture_.virtual_clock) {
    virtual_clock_.advance(cost_s);
  } else if (cost_s > 0) {
    std::this_thread::sleep_for(std::chrono::duration<double>(cost_s));
  }
  for (auto& r : out) r.backend_infer_ms = cost_s * 1000.0 / static_cast<double>(out.size());
  return out;
}

}  // namespace asrbench
