#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "asrbench/corpus.hpp"

namespace asrbench::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

// In-memory manifest of `n` synthetic samples with placeholder audio paths.
DatasetManifest synthetic_manifest(const std::string& dataset_id, std::set<Track> tracks, std::size_t n,
                                   double duration_s = 4.0, const std::string& language = "en");

/// Writes `manifest` as `{dir}/{dataset_id}.jsonl` plus a small placeholder
/// file for every audio path, and returns the manifest path.
std::filesystem::path write_manifest(const DatasetManifest& manifest, const std::filesystem::path& dir);

// Mock fixture TSV mapping every sample id to its reference, plus `options`
// lines (`@key\tvalue`).
std::string echo_fixture(const DatasetManifest& manifest, const std::vector<std::string>& options = {});

}  // namespace asrbench::testing
