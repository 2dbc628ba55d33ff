#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "asrbench/corpus.hpp"
#include "asrbench/runner.hpp"

namespace asrbench {

struct ModelCard {
  std::string model_id;
  std::string display_name;
  std::string organization;
  bool open_source = true;
  std::string encoder_family;
  std::string decoder_family;
  std::size_t n_languages = 1;
  std::string notes;

  bool operator==(const ModelCard&) const = default;
};

/// Model metadata, one JSON object per line. Models without a card are
/// reported as open source under their raw id.
class ModelRegistry {
 public:
  static ModelRegistry load(const std::filesystem::path& path);
  static ModelRegistry parse(std::istream& in, std::string_view source_name = "<registry>");

  // Throws ReportError on a duplicate id or n_languages == 0.
  void add(ModelCard card);
  const ModelCard* find(std::string_view model_id) const;
  // The registered card, or a default one for an unknown id.
  ModelCard card_for(const std::string& model_id) const;
  std::size_t size() const noexcept { return cards_.size(); }

 private:
  std::map<std::string, ModelCard, std::less<>> cards_;
};

/// One model's score on one dataset (and language, for multilingual sets).
struct DatasetScore {
  std::string model_id;
  std::string dataset_id;
  std::optional<std::string> language;
  double wer_percent = 0.0;
  double audio_seconds = 0.0;
  std::optional<double> transcription_seconds;  // absent when untimed
};

// Scores of a completed result; multilingual results yield one entry per
// language present in the scored samples. Aborted or unscored results yield none.
std::vector<DatasetScore> summarize(const EvalResult& result);

struct LeaderboardRow {
  std::size_t rank = 0;
  std::string model_id;
  ModelCard card;
  double avg_wer = 0.0;                          // percent
  std::map<std::string, double> per_column_wer;  // column -> percent
  std::optional<double> rtfx;                    // pooled; absent for closed-source models
};

struct Leaderboard {
  Track track = Track::leaderboard;
  std::vector<std::string> columns;  // dataset ids, or upper-case languages for multilingual
  std::vector<LeaderboardRow> rows;  // rank order
  std::vector<std::string> warnings;
};

// Macro-average over the track's dataset set. A model lacking a score for
// any dataset is excluded with a warning. Throws ReportError("no results").
Leaderboard aggregate_track(const std::vector<DatasetScore>& scores, const ModelRegistry& registry,
                            Track track = Track::leaderboard);
// Per-language means over the datasets that include that language; the
// average is the mean of the language columns.
Leaderboard aggregate_multilingual(const std::vector<DatasetScore>& scores, const ModelRegistry& registry);
Leaderboard aggregate_longform(const std::vector<DatasetScore>& scores, const ModelRegistry& registry);

// Picks the aggregation for `track` over every result of that track. Aborted
// results are excluded with a warning.
Leaderboard aggregate_results(const std::vector<EvalResult>& results, Track track, const ModelRegistry& registry);

enum class ReportFormat { json, csv, markdown, html };

ReportFormat parse_report_format(std::string_view name);
std::string_view extension(ReportFormat format);

std::string render(const Leaderboard& board, ReportFormat format);

struct LoadedResults {
  std::vector<EvalResult> results;
  std::vector<std::string> warnings;  // files that are not results
};

// Every result JSON below `dir`, in path order.
LoadedResults load_results_dir(const std::filesystem::path& dir);

}  // namespace asrbench
