#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "asrbench/clock.hpp"

namespace asrbench {

struct TranscriptionRequest {
  std::string sample_id;
  std::string audio_path;
  std::optional<std::string> language_hint;
  // Harness-side duration, used by simulated backends; never sent on the wire.
  double duration_s = 0.0;
};

struct TranscriptionResponse {
  std::string sample_id;
  std::string hypothesis;
  // Recorded for reference; RTFx always uses the harness clock.
  std::optional<double> backend_infer_ms;

  bool operator==(const TranscriptionResponse&) const = default;
};

enum class AdapterKind { mock, subprocess, http };

std::string_view to_string(AdapterKind kind);

std::vector<std::size_t> default_backoff_ladder();

struct AdapterConfig {
  AdapterKind kind = AdapterKind::mock;
  std::string endpoint_or_cmd;
  std::size_t initial_batch_size = 64;
  std::vector<std::size_t> backoff_ladder = default_backoff_ladder();
  double timeout_s = 600.0;

  // Throws ConfigError unless the ladder is strictly descending, ends at 1 and
  // contains initial_batch_size.
  void validate_batching() const;
  // validate_batching() plus a positive timeout and a non-empty target.
  void validate() const;
  // Canonical JSON text, used for the config digest.
  std::string canonical_json() const;

  /// Parses `mock:PATH`, `subprocess:CMD` or `http:URL`.
  static AdapterConfig parse(std::string_view text);
};

// Ladder starting at `batch_size` and continuing with the default rungs below it.
std::vector<std::size_t> ladder_from(std::size_t batch_size);

// Completes a descending ladder down to 1 by halving below its last rung, so
// {64, 48, 32, 16} becomes {64, 48, 32, 16, 8, 4, 2, 1}.
std::vector<std::size_t> complete_ladder(std::vector<std::size_t> ladder);

/// A transcription backend. One batch in flight per instance; implementations
/// need not be thread-safe.
class Adapter {
 public:
  virtual ~Adapter() = default;

  virtual std::string name() const = 0;
  // Connects or handshakes; idempotent. Called implicitly by the first batch.
  virtual void prepare() {}
  // Exactly one response per request, in any order.
  virtual std::vector<TranscriptionResponse> transcribe_batch(std::span<const TranscriptionRequest> requests) = 0;
  // Clock the harness uses to time calls into this adapter.
  virtual const Clock& clock() const { return steady_clock(); }
};

std::unique_ptr<Adapter> make_adapter(const AdapterConfig& config);

/// Reorders `responses` to match `requests`. Throws ProtocolError
/// ("missing response for id: X") when a request goes unanswered, and on
/// duplicate or unknown ids.
std::vector<TranscriptionResponse> associate_responses(std::span<const TranscriptionRequest> requests,
                                                       std::vector<TranscriptionResponse> responses);

// Path of a 1 s, 16 kHz mono silent WAV written once per process.
const std::filesystem::path& warmup_audio_path();

/// Runs one transcription of the bundled silence clip, after prepare(), and
/// returns the elapsed seconds. The hypothesis is discarded.
double warmup(Adapter& adapter);

// --- In-process mock ------------------------------------------------------

/// Fixture-backed mock. The fixture is a TSV of `sample_id<TAB>hypothesis`;
/// lines `@key<TAB>value` set options:
///   @max_batch            reject larger batches with a capacity error
///   @ms_per_audio_second  simulated cost per second of audio
///   @clock                `sleep` (default) or `virtual`
///   @fail_on              sample id whose batch raises a fatal error
struct MockFixture {
  std::map<std::string, std::string> hypotheses;
  std::optional<std::size_t> max_batch;
  double ms_per_audio_second = 0.0;
  bool virtual_clock = false;
  std::set<std::string> fail_on;

  static MockFixture load(const std::filesystem::path& path);
  static MockFixture parse(std::string_view tsv, std::string_view source_name = "<fixture>");
};

class MockAdapter final : public Adapter {
 public:
  explicit MockAdapter(MockFixture fixture, std::string name = "mock");

  std::string name() const override { return name_; }
  std::vector<TranscriptionResponse> transcribe_batch(std::span<const TranscriptionRequest> requests) override;
  const Clock& clock() const override;

  // Sizes of every batch submitted, including rejected ones.
  const std::vector<std::size_t>& invocations() const noexcept { return invocations_; }

 private:
  MockFixture fixture_;
  std::string name_;
  ManualClock virtual_clock_;
  std::vector<std::size_t> invocations_;
};

// --- Child process over stdio --------------------------------------------

/// Runs `command` through /bin/sh and speaks the line-delimited JSON protocol:
/// hello handshake, one `transcribe` line per batch, `bye` on destruction.
class SubprocessAdapter final : public Adapter {
 public:
  SubprocessAdapter(std::string command, double timeout_s);
  ~SubprocessAdapter() override;
  SubprocessAdapter(const SubprocessAdapter&) = delete;
  SubprocessAdapter& operator=(const SubprocessAdapter&) = delete;

  std::string name() const override;
  void prepare() override;
  std::vector<TranscriptionResponse> transcribe_batch(std::span<const TranscriptionRequest> requests) override;

  bool handshaken() const noexcept { return handshaken_; }

 private:
  void spawn();
  void shutdown() noexcept;
  void write_line(const std::string& line);
  std::string read_line();

  std::string command_;
  double timeout_s_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  bool handshaken_ = false;
  std::string remote_name_;
};

// --- HTTP -------------------------------------------------------------------

/// POSTs batches to `{endpoint}/transcribe` with base64 audio. HTTP 413 maps
/// to a capacity error.
class HttpAdapter final : public Adapter {
 public:
  HttpAdapter(std::string endpoint, double timeout_s);
  ~HttpAdapter() override;

  std::string name() const override;
  std::vector<TranscriptionResponse> transcribe_batch(std::span<const TranscriptionRequest> requests) override;

 private:
  std::string endpoint_;
  std::string origin_;
  std::string base_path_;
  double timeout_s_;
};

}  // namespace asrbench
