#include <gtest/gtest.h>

#include "asrbench/error.hpp"
#include "asrbench/runner.hpp"
#include "json.hpp"
#include "support/fixtures.hpp"

using namespace asrbench;
using asrbench::testing::read_file;
using asrbench::testing::synthetic_manifest;
using asrbench::testing::TempDir;
using asrbench::testing::write_file;

namespace {

const NormalizationRules& english() {
  static const NormalizationRules rules = NormalizationRules::builtin_english();
  return rules;
}

MockFixture echo(const DatasetManifest& m, std::vector<std::string> options = {}) {
  return MockFixture::parse(asrbench::testing::echo_fixture(m, options));
}

AdapterConfig mock_config() { return AdapterConfig::parse("mock:fixture.tsv"); }

}  // namespace

TEST(RunEval, IdentityHypothesesScoreZero) {
  const auto m = synthetic_manifest("ls-clean", {Track::leaderboard}, 10);
  MockAdapter mock(echo(m));
  const auto r = run_eval(mock, m, Track::leaderboard, english(), mock_config());
  ASSERT_TRUE(r.wer);
  EXPECT_EQ(r.wer->value, 0.0);
  EXPECT_EQ(r.status, RunStatus::completed);
  EXPECT_EQ(r.per_sample.size(), 10u);
  EXPECT_EQ(r.skipped, 0u);
  EXPECT_EQ(r.model_id, "mock");
  EXPECT_EQ(r.rules_id, english().id());
}

TEST(RunEval, OneSubstitutionInTwentyTokens) {
  DatasetManifest m = synthetic_manifest("tiny", {Track::leaderboard}, 10);
  for (std::size_t i = 0; i < m.samples.size(); ++i) m.samples[i].reference = "good morning";
  auto fx = echo(m);
  fx.hypotheses[m.samples[4].id] = "good evening";
  MockAdapter mock(fx);
  const auto r = run_eval(mock, m, Track::leaderboard, english(), mock_config());
  ASSERT_TRUE(r.wer);
  EXPECT_EQ(r.wer->denominator, 20u);
  EXPECT_EQ(r.wer->numerator, 1u);
  EXPECT_DOUBLE_EQ(r.wer->value, 0.05);
  EXPECT_EQ(r.per_sample[4].edit_counts, (EditCounts{1, 0, 0, 2}));
}

TEST(RunEval, NormalizationAppliesToBothSides) {
  DatasetManifest m = synthetic_manifest("sym", {Track::leaderboard}, 2);
  m.samples[0].reference = "We're at Twenty-Five percent, uh, colour-wise.";
  m.samples[1].reference = "Hello";
  auto fx = echo(m);
  fx.hypotheses[m.samples[0].id] = "we are at 25 percent color wise";
  fx.hypotheses[m.samples[1].id] = "HELLO!!!";
  MockAdapter mock(fx);
  const auto r = run_eval(mock, m, Track::leaderboard, english(), mock_config());
  EXPECT_EQ(r.wer->numerator, 0u);
  EXPECT_EQ(r.per_sample[0].ref_norm_tokens, r.per_sample[0].hyp_norm_tokens);
  EXPECT_EQ(r.per_sample[0].ref_raw, m.samples[0].reference);
  EXPECT_EQ(r.per_sample[1].hyp_raw, "HELLO!!!");
}

TEST(RunEval, VirtualClockRtfxIsExact) {
  const auto m = synthetic_manifest("timed", {Track::leaderboard}, 125, 4.0);  // 500 s
  MockAdapter mock(echo(m, {"@ms_per_audio_second\t2", "@clock\tvirtual"}));
  const auto r = run_eval(mock, m, Track::leaderboard, english(), mock_config());
  ASSERT_TRUE(r.rtfx);
  EXPECT_DOUBLE_EQ(r.rtfx->audio_seconds, 500.0);
  EXPECT_NEAR(r.rtfx->transcription_seconds, 1.0, 1e-12);
  EXPECT_NEAR(r.rtfx->rtfx, 500.0, 1e-9);
  double wall = 0.0;
  for (const auto& s : r.per_sample) wall += s.wall_s;
  EXPECT_NEAR(wall, r.rtfx->transcription_seconds, 1e-12);
}

TEST(RunEval, SleepingMockRtfxWithinTolerance) {
  const auto m = synthetic_manifest("sleepy", {Track::leaderboard}, 125, 4.0);  // 500 s
  MockAdapter mock(echo(m, {"@ms_per_audio_second\t2"}));
  const auto r = run_eval(mock, m, Track::leaderboard, english(), mock_config());
  ASSERT_TRUE(r.rtfx);
  EXPECT_NEAR(r.rtfx->rtfx, 500.0, 100.0);
}

TEST(RunEval, EmptyReferencesAreSkippedAndNeverSent) {
  DatasetManifest m = synthetic_manifest("skips", {Track::leaderboard}, 5);
  m.samples[1].reference = "uh... mhm";
  m.samples[3].reference = "?!";
  MockAdapter mock(echo(m));
  const auto r = run_eval(mock, m, Track::leaderboard, english(), mock_config());
  EXPECT_EQ(r.skipped, 2u);
  EXPECT_EQ(r.skipped + r.per_sample.size(), 5u);
  EXPECT_EQ(mock.invocations(), (std::vector<std::size_t>{3}));
  double audio = 0.0;
  for (const auto& s : r.per_sample) audio += s.audio_s;
  EXPECT_DOUBLE_EQ(r.rtfx ? r.rtfx->audio_seconds : audio, audio);
}

TEST(RunEval, StoredWerIsRecomputable) {
  DatasetManifest m = synthetic_manifest("recompute", {Track::leaderboard}, 30);
  auto fx = echo(m);
  fx.hypotheses[m.samples[2].id] = "completely different words here";
  fx.hypotheses[m.samples[9].id] = "";
  MockAdapter noisy(fx);
  const auto r = run_eval(noisy, m, Track::leaderboard, english(), mock_config());
  std::vector<EditCounts> counts;
  for (const auto& s : r.per_sample) counts.push_back(s.edit_counts);
  EXPECT_EQ(corpus_wer(counts), *r.wer);
  EXPECT_GT(r.wer->value, 0.0);
}

TEST(RunEval, EmptySelectionIsAnError) {
  const auto m = synthetic_manifest("fleurs", {Track::multilingual}, 3, 5.0, "de");
  MockAdapter mock(echo(m));
  try {
    (void)run_eval(mock, m, Track::multilingual, english(), mock_config(), {.language = std::string("pt")});
    FAIL();
  } catch (const RunError& e) {
    EXPECT_NE(std::string(e.what()).find("no samples for track"), std::string::npos);
  }
  EXPECT_THROW((void)run_eval(mock, m, Track::leaderboard, english(), mock_config()), ManifestError);
}

TEST(RunEval, MultilingualUsesBasicRules) {
  DatasetManifest m = synthetic_manifest("mls", {Track::multilingual}, 2, 5.0, "de");
  m.samples[0].reference = "Äh, zwei Straßen!";
  m.samples[1].reference = "uh colour";
  MockAdapter mock(echo(m));
  const auto r = run_eval(mock, m, Track::multilingual, english(), mock_config());
  EXPECT_EQ(r.rules_id, "basic-v1");
  EXPECT_EQ(r.per_sample[0].ref_norm_tokens, (std::vector<std::string>{"äh", "zwei", "straßen"}));
  EXPECT_EQ(r.per_sample[1].ref_norm_tokens, (std::vector<std::string>{"uh", "colour"}));
  EXPECT_EQ(r.config_digest, config_digest("basic-v1", mock_config()));
}

TEST(RunEval, AdapterFailureAbortsWithPartialResult) {
  TempDir dir;
  const auto m = synthetic_manifest("abort", {Track::leaderboard}, 40);
  MockAdapter mock(echo(m, {"@fail_on\t" + m.samples[20].id}));
  AdapterConfig c = mock_config();
  c.backoff_ladder = {16, 8, 4, 2, 1};
  c.initial_batch_size = 16;
  const auto r = run_eval(mock, m, Track::leaderboard, english(), c, {.out_dir = dir.path()});
  EXPECT_EQ(r.status, RunStatus::aborted);
  ASSERT_TRUE(r.error);
  EXPECT_NE(r.error->find(m.samples[20].id), std::string::npos);
  EXPECT_EQ(r.per_sample.size(), 16u);
  const auto text = read_file(dir.path() / "mock" / "abort.json");
  const auto j = nlohmann::json::parse(text);
  EXPECT_EQ(j["status"], "aborted");
  EXPECT_EQ(j["per_sample"].size(), 16u);
  EXPECT_EQ(load_result(dir.path() / "mock" / "abort.json"), r);
}

TEST(RunEval, ConfigDigestTracksRulesAndAdapter) {
  AdapterConfig a = mock_config();
  AdapterConfig b = mock_config();
  b.initial_batch_size = 32;
  b.backoff_ladder = ladder_from(32);
  EXPECT_NE(config_digest("x", a), config_digest("x", b));
  EXPECT_NE(config_digest("x", a), config_digest("y", a));
  EXPECT_EQ(config_digest("x", a).size(), 64u);
}

TEST(PersistResult, RoundTripsEveryField) {
  TempDir dir;
  DatasetManifest m = synthetic_manifest("rt", {Track::leaderboard}, 7, 3.3);
  m.samples[0].reference = "“Quoted” text, naïve café — ünïcödé";
  MockAdapter mock(echo(m, {"@ms_per_audio_second\t0.7", "@clock\tvirtual"}));
  const auto r = run_eval(mock, m, Track::leaderboard, english(), mock_config(),
                          {.model_id = "org/model-v2", .warmup_s = 0.125});
  const auto path = persist_result(r, dir.path());
  EXPECT_EQ(path, dir.path() / "org__model-v2" / "rt.json");
  EXPECT_EQ(load_result(path), r);
  const auto j = nlohmann::json::parse(read_file(path));
  for (const char* key : {"model_id", "dataset_id", "track", "per_sample", "wer", "rtfx", "skipped",
                          "config_digest", "status"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  for (const char* key : {"value", "numerator", "denominator"}) EXPECT_TRUE(j["wer"].contains(key));
  for (const char* key : {"audio_seconds", "transcription_seconds", "rtfx"}) EXPECT_TRUE(j["rtfx"].contains(key));
}

TEST(PersistResult, OverwritesAtomically) {
  TempDir dir;
  const auto m = synthetic_manifest("ow", {Track::leaderboard}, 3);
  MockAdapter mock(echo(m));
  auto r = run_eval(mock, m, Track::leaderboard, english(), mock_config());
  const auto path = persist_result(r, dir.path());
  write_file(path, "stale");
  r.warmup_s = 9.5;
  persist_result(r, dir.path());
  EXPECT_EQ(load_result(path), r);
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(path.parent_path())) {
    (void)e;
    ++files;
  }
  EXPECT_EQ(files, 1u);
}

TEST(PersistResult, UnwritableDirectoryNamesIt) {
  TempDir dir;
  write_file(dir / "blocker", "a file, not a directory");
  EvalResult r;
  r.model_id = "m";
  r.dataset_id = "d";
  try {
    (void)persist_result(r, dir / "blocker");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find((dir / "blocker").string()), std::string::npos) << e.what();
  }
}

TEST(PersistResult, LanguageFilteredPath) {
  EvalResult r;
  r.model_id = "m";
  r.dataset_id = "fleurs";
  r.language = "fr";
  EXPECT_EQ(result_path(r, "out"), std::filesystem::path("out/m/fleurs.fr.json"));
}

TEST(ResultJson, RejectsNonResults) {
  EXPECT_THROW((void)result_from_json("{}"), ReportError);
  EXPECT_THROW((void)result_from_json("[1,2]"), ReportError);
  EXPECT_THROW((void)result_from_json("not json"), ReportError);
  EXPECT_THROW((void)result_from_json(R"({"model_id":"m","dataset_id":"d","per_sample":[],"track":"x"})"),
               ReportError);
}
