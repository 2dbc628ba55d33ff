#include <map>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "asrbench/batching.hpp"
#include "asrbench/error.hpp"

using namespace asrbench;

namespace {

std::vector<TranscriptionRequest> requests(std::size_t n) {
  std::vector<TranscriptionRequest> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({"u" + std::to_string(i), "/dev/null", std::nullopt, 1.0});
  return out;
}

MockFixture fixture(std::size_t n, std::optional<std::size_t> max_batch) {
  MockFixture f;
  for (std::size_t i = 0; i < n; ++i) f.hypotheses["u" + std::to_string(i)] = "word " + std::to_string(i * 31 % 17);
  f.max_batch = max_batch;
  f.virtual_clock = true;
  f.ms_per_audio_second = 1.0;
  return f;
}

AdapterConfig config_with(std::vector<std::size_t> ladder) {
  AdapterConfig c;
  c.backoff_ladder = complete_ladder(std::move(ladder));
  c.initial_batch_size = c.backoff_ladder.front();
  return c;
}

std::map<std::string, std::string> as_map(const std::vector<TranscriptionResponse>& responses) {
  std::map<std::string, std::string> m;
  for (const auto& r : responses) m.emplace(r.sample_id, r.hypothesis);
  return m;
}

// Counts every call on a virtual clock: 1 s per call whether or not it succeeds.
class ChargingAdapter final : public Adapter {
 public:
  explicit ChargingAdapter(std::size_t max_batch) : max_batch_(max_batch) {}
  std::string name() const override { return "charging"; }
  const Clock& clock() const override { return clock_; }
  std::vector<TranscriptionResponse> transcribe_batch(std::span<const TranscriptionRequest> reqs) override {
    clock_.advance(1.0);
    if (reqs.size() > max_batch_) throw CapacityError("too big");
    std::vector<TranscriptionResponse> out;
    for (auto it = reqs.rbegin(); it != reqs.rend(); ++it) out.push_back({it->sample_id, it->sample_id, {}});
    return out;
  }

 private:
  std::size_t max_batch_;
  ManualClock clock_;
};

}  // namespace

TEST(AdaptiveBatching, SettlesAtCapacity) {
  MockAdapter mock(fixture(100, 16));
  const auto reqs = requests(100);
  const auto outcome = with_adaptive_batching(mock, reqs, config_with({64, 48, 32, 16}));
  EXPECT_EQ(mock.invocations(), (std::vector<std::size_t>{64, 48, 32, 16, 16, 16, 16, 16, 16, 4}));
  EXPECT_EQ(outcome.settled_rung, 16u);
  ASSERT_EQ(outcome.responses.size(), 100u);
  for (std::size_t i = 0; i < 100; ++i) EXPECT_EQ(outcome.responses[i].sample_id, reqs[i].sample_id);
  EXPECT_EQ(outcome.attempts.size(), 10u);
  EXPECT_FALSE(outcome.attempts[0].succeeded);
  EXPECT_TRUE(outcome.attempts[3].succeeded);
}

TEST(AdaptiveBatching, ResultsIndependentOfRung) {
  const auto reqs = requests(100);
  MockAdapter backoff(fixture(100, 16));
  MockAdapter forced16(fixture(100, 16));
  MockAdapter forced8(fixture(100, std::nullopt));
  MockAdapter at64(fixture(100, std::nullopt));
  const auto a = as_map(with_adaptive_batching(backoff, reqs, config_with({64, 48, 32, 16})).responses);
  const auto b = as_map(with_adaptive_batching(forced16, reqs, config_with({16})).responses);
  const auto c = as_map(with_adaptive_batching(forced8, reqs, config_with({8})).responses);
  const auto d = as_map(with_adaptive_batching(at64, reqs, config_with({64})).responses);
  EXPECT_EQ(a.size(), 100u);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  EXPECT_EQ(a, d);
  EXPECT_EQ(forced16.invocations(), (std::vector<std::size_t>{16, 16, 16, 16, 16, 16, 4}));
}

TEST(AdaptiveBatching, NoCapacityErrorsUsesFullBatches) {
  MockAdapter mock(fixture(150, std::nullopt));
  const auto outcome = with_adaptive_batching(mock, requests(150), AdapterConfig{});
  EXPECT_EQ(mock.invocations(), (std::vector<std::size_t>{64, 64, 22}));
  EXPECT_EQ(outcome.settled_rung, 64u);
}

TEST(AdaptiveBatching, RemainderSmallerThanNextRungSkipsAhead) {
  MockAdapter mock(fixture(10, 3));
  (void)with_adaptive_batching(mock, requests(10), AdapterConfig{});
  // 10 fails at 64; rungs 48, 32 and 16 would resubmit the same 10, so 8 is next.
  EXPECT_EQ(mock.invocations(), (std::vector<std::size_t>{10, 8, 4, 2, 2, 2, 2, 2}));
}

TEST(AdaptiveBatching, CapacityErrorAtRungOneIsFatal) {
  ChargingAdapter adapter(0);
  try {
    (void)with_adaptive_batching(adapter, requests(3), config_with({2}));
    FAIL();
  } catch (const FatalAdapterError& e) {
    EXPECT_NE(std::string(e.what()).find("sample does not fit: u0"), std::string::npos);
  }
}

TEST(AdaptiveBatching, CallTimeIncludesRejectedAttempts) {
  ChargingAdapter adapter(16);
  std::vector<double> batch_times;
  const auto outcome = with_adaptive_batching(
      adapter, requests(40), config_with({64, 48, 32, 16}),
      [&](auto, auto, double secs) { batch_times.push_back(secs); });
  // 40 rejected at 64 (the remainder is the whole set), 32 rejected, then 16, 16, 8.
  EXPECT_DOUBLE_EQ(outcome.call_seconds, 5.0);
  EXPECT_EQ(batch_times, (std::vector<double>{1.0, 1.0, 1.0}));
  EXPECT_EQ(outcome.responses.size(), 40u);
}

TEST(AdaptiveBatching, FatalErrorPropagatesAfterReportingFinishedBatches) {
  auto f = fixture(50, std::nullopt);
  f.fail_on = {"u35"};
  MockAdapter mock(f);
  std::size_t reported = 0;
  EXPECT_THROW((void)with_adaptive_batching(mock, requests(50), config_with({16}),
                                            [&](auto reqs, auto, double) { reported += reqs.size(); }),
               FatalAdapterError);
  EXPECT_EQ(reported, 32u);
}

TEST(AdaptiveBatching, InvalidConfigIsRejected) {
  MockAdapter mock(fixture(1, std::nullopt));
  AdapterConfig c;
  c.backoff_ladder = {64, 48, 32, 16};
  EXPECT_THROW((void)with_adaptive_batching(mock, requests(1), c), ConfigError);
}

TEST(AdaptiveBatchingProperty, CompleteAndMonotonic) {
  std::mt19937 rng(31337);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 200;
    const std::size_t cap = 1 + rng() % 70;
    MockAdapter mock(fixture(n, cap));
    const auto reqs = requests(n);
    const auto outcome = with_adaptive_batching(mock, reqs, AdapterConfig{});
    ASSERT_EQ(outcome.responses.size(), n);
    std::set<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_EQ(outcome.responses[i].sample_id, reqs[i].sample_id);
      ids.insert(outcome.responses[i].sample_id);
    }
    ASSERT_EQ(ids.size(), n);
    for (std::size_t i = 1; i < outcome.attempts.size(); ++i) {
      ASSERT_LE(outcome.attempts[i].rung, outcome.attempts[i - 1].rung);
    }
    for (const auto& a : outcome.attempts) ASSERT_EQ(a.succeeded, a.batch_size <= cap);
  }
}
