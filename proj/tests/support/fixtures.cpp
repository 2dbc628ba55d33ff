#include "support/fixtures.hpp"

#include <atomic>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include <fmt/format.h>

namespace asrbench::testing {

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() /
          fmt::format("asrbench-test-{}-{}-{:08x}", ::getpid(), counter++, rd());
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::permissions(path_, std::filesystem::perms::owner_all, std::filesystem::perm_options::add, ec);
  std::filesystem::remove_all(path_, ec);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

DatasetManifest synthetic_manifest(const std::string& dataset_id, std::set<Track> tracks, std::size_t n,
                                   double duration_s, const std::string& language) {
  static const std::vector<std::string> words = {"the",   "quarterly", "results", "were",  "strong",
                                                 "and",   "we",        "expect",  "growth", "next",
                                                 "year",  "across",    "every",   "market", "segment"};
  DatasetManifest m;
  m.dataset_id = dataset_id;
  m.tracks = std::move(tracks);
  m.license = "CC-BY-4.0";
  for (std::size_t i = 0; i < n; ++i) {
    Sample s;
    s.id = fmt::format("{}-{:04d}", dataset_id, i);
    s.audio_path = fmt::format("audio/{}.wav", s.id);
    s.duration_s = duration_s;
    std::string text;
    for (std::size_t w = 0; w < 4 + i % 5; ++w) {
      if (!text.empty()) text += ' ';
      text += words[(i * 7 + w * 3) % words.size()];
    }
    s.reference = text;
    s.language = language;
    s.dataset_id = dataset_id;
    m.samples.push_back(std::move(s));
  }
  return m;
}

std::filesystem::path write_manifest(const DatasetManifest& manifest, const std::filesystem::path& dir) {
  const auto path = dir / (manifest.dataset_id + ".jsonl");
  std::ostringstream ss;
  serialize_manifest(manifest, ss);
  write_file(path, ss.str());
  for (const auto& s : manifest.samples) {
    const std::filesystem::path audio(s.audio_path);
    write_file(audio.is_absolute() ? audio : dir / audio, "RIFF" + s.id);
  }
  return path;
}

std::string echo_fixture(const DatasetManifest& manifest, const std::vector<std::string>& options) {
  std::string out;
  for (const auto& o : options) out += o + "\n";
  for (const auto& s : manifest.samples) out += s.id + "\t" + s.reference + "\n";
  return out;
}

}  // namespace asrbench::testing
