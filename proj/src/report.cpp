#include "asrbench/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "asrbench/error.hpp"
#include "json.hpp"

namespace asrbench {

using nlohmann::json;

ModelRegistry ModelRegistry::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot read model registry: {}", path.string()));
  return parse(in, path.string());
}

ModelRegistry ModelRegistry::parse(std::istream& in, std::string_view source_name) {
  ModelRegistry registry;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      ModelCard card;
      card.model_id = j.at("model_id").get<std::string>();
      card.display_name = j.value("display_name", card.model_id);
      card.organization = j.value("organization", "");
      card.open_source = j.value("open_source", true);
      card.encoder_family = j.value("encoder_family", "");
      card.decoder_family = j.value("decoder_family", "");
      card.n_languages = j.value("n_languages", std::size_t{1});
      card.notes = j.value("notes", "");
      registry.add(std::move(card));
    } catch (const json::exception& e) {
      throw ReportError(fmt::format("{}:{}: {}", source_name, number, e.what()));
    } catch (const ReportError& e) {
      throw ReportError(fmt::format("{}:{}: {}", source_name, number, e.what()));
    }
  }
  return registry;
}

void ModelRegistry::add(ModelCard card) {
  if (card.model_id.empty()) throw ReportError("model card without model_id");
  if (card.n_languages == 0) throw ReportError(fmt::format("model {} has n_languages 0", card.model_id));
  if (card.display_name.empty()) card.display_name = card.model_id;
  const std::string id = card.model_id;
  if (!cards_.emplace(id, std::move(card)).second) throw ReportError(fmt::format("duplicate model id: {}", id));
}

const ModelCard* ModelRegistry::find(std::string_view model_id) const {
  const auto it = cards_.find(model_id);
  return it == cards_.end() ? nullptr : &it->second;
}

ModelCard ModelRegistry::card_for(const std::string& model_id) const {
  if (const auto* card = find(model_id)) return *card;
  ModelCard card;
  card.model_id = model_id;
  card.display_name = model_id;
  return card;
}

std::vector<DatasetScore> summarize(const EvalResult& result) {
  if (result.status != RunStatus::completed || !result.wer) return {};
  if (result.track != Track::multilingual || result.language) {
    DatasetScore s{result.model_id, result.dataset_id, result.language, result.wer->percent(), 0.0, std::nullopt};
    if (result.rtfx) {
      s.audio_seconds = result.rtfx->audio_seconds;
      s.transcription_seconds = result.rtfx->transcription_seconds;
    } else {
      for (const auto& r : result.per_sample) s.audio_seconds += r.audio_s;
    }
    if (result.track == Track::multilingual && !s.language && !result.per_sample.empty()) {
      s.language = result.per_sample.front().language;
    }
    return {s};
  }
  struct Pool {
    std::vector<EditCounts> counts;
    double audio = 0.0;
    double wall = 0.0;
  };
  std::map<std::string, Pool> pools;
  for (const auto& r : result.per_sample) {
    Pool& p = pools[r.language];
    p.counts.push_back(r.edit_counts);
    p.audio += r.audio_s;
    p.wall += r.wall_s;
  }
  std::vector<DatasetScore> out;
  for (const auto& [language, pool] : pools) {
    DatasetScore s{result.model_id, result.dataset_id, language, corpus_wer(pool.counts).percent(), pool.audio,
                   std::nullopt};
    if (result.rtfx) s.transcription_seconds = pool.wall;
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

constexpr double kTieTolerance = 1e-9;

double mean(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

std::optional<double> pooled_rtfx(const std::vector<const DatasetScore*>& scores) {
  double audio = 0.0;
  double time = 0.0;
  for (const auto* s : scores) {
    if (!s->transcription_seconds) return std::nullopt;
    audio += s->audio_seconds;
    time += *s->transcription_seconds;
  }
  if (!(audio > 0.0) || !(time > 0.0)) return std::nullopt;
  return audio / time;
}

void rank(std::vector<LeaderboardRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const LeaderboardRow& a, const LeaderboardRow& b) {
    if (std::abs(a.avg_wer - b.avg_wer) > kTieTolerance) return a.avg_wer < b.avg_wer;
    const double ra = a.rtfx.value_or(-1.0);
    const double rb = b.rtfx.value_or(-1.0);
    if (ra != rb) return ra > rb;
    return a.model_id < b.model_id;
  });
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].rank = i + 1;
}

using ScoreKey = std::pair<std::string, std::string>;  // dataset, language

// model -> (dataset, language) -> score; rejects duplicates.
std::map<std::string, std::map<ScoreKey, const DatasetScore*>> index_scores(const std::vector<DatasetScore>& scores) {
  std::map<std::string, std::map<ScoreKey, const DatasetScore*>> by_model;
  for (const auto& s : scores) {
    const ScoreKey key{s.dataset_id, s.language.value_or("")};
    if (!by_model[s.model_id].emplace(key, &s).second) {
      throw ReportError(fmt::format("duplicate result for model {} on {}{}", s.model_id, s.dataset_id,
                                    s.language ? "." + *s.language : std::string{}));
    }
  }
  return by_model;
}

int language_order(const std::string& lang) {
  static const std::vector<std::string> order{"de", "fr", "it", "es", "pt"};
  const auto it = std::find(order.begin(), order.end(), lang);
  return it == order.end() ? static_cast<int>(order.size()) : static_cast<int>(it - order.begin());
}

std::string upper(std::string s) {
  for (char& c : s) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return s;
}

LeaderboardRow make_row(const std::string& model_id, const ModelRegistry& registry,
                        const std::vector<const DatasetScore*>& used) {
  LeaderboardRow row;
  row.model_id = model_id;
  row.card = registry.card_for(model_id);
  if (row.card.open_source) row.rtfx = pooled_rtfx(used);
  return row;
}

}  // namespace

Leaderboard aggregate_track(const std::vector<DatasetScore>& scores, const ModelRegistry& registry, Track track) {
  if (scores.empty()) throw ReportError("no results");
  Leaderboard board;
  board.track = track;
  const auto by_model = index_scores(scores);
  std::set<std::string> datasets;
  for (const auto& s : scores) datasets.insert(s.dataset_id);
  board.columns.assign(datasets.begin(), datasets.end());

  for (const auto& [model, cells] : by_model) {
    std::map<std::string, std::vector<const DatasetScore*>> per_dataset;
    for (const auto& [key, score] : cells) per_dataset[key.first].push_back(score);
    std::vector<std::string> missing;
    for (const auto& d : datasets) {
      if (!per_dataset.contains(d)) missing.push_back(d);
    }
    if (!missing.empty()) {
      board.warnings.push_back(fmt::format("{}: excluded, no result for {}", model, fmt::join(missing, ", ")));
      continue;
    }
    std::vector<const DatasetScore*> used;
    std::vector<double> values;
    std::map<std::string, double> columns;
    for (const auto& [dataset, list] : per_dataset) {
      if (list.size() > 1) {
        throw ReportError(fmt::format("model {} has {} results for {}", model, list.size(), dataset));
      }
      used.push_back(list.front());
      values.push_back(list.front()->wer_percent);
      columns[dataset] = list.front()->wer_percent;
    }
    LeaderboardRow row = make_row(model, registry, used);
    row.avg_wer = mean(values);
    row.per_column_wer = std::move(columns);
    board.rows.push_back(std::move(row));
  }
  if (board.rows.empty()) throw ReportError("no results: every model is missing a dataset");
  rank(board.rows);
  return board;
}

Leaderboard aggregate_longform(const std::vector<DatasetScore>& scores, const ModelRegistry& registry) {
  return aggregate_track(scores, registry, Track::longform);
}

Leaderboard aggregate_multilingual(const std::vector<DatasetScore>& scores, const ModelRegistry& registry) {
  if (scores.empty()) throw ReportError("no results");
  Leaderboard board;
  board.track = Track::multilingual;
  std::vector<DatasetScore> usable;
  for (const auto& s : scores) {
    if (s.language && !s.language->empty()) {
      usable.push_back(s);
    } else {
      board.warnings.push_back(fmt::format("{} on {}: ignored, no language", s.model_id, s.dataset_id));
    }
  }
  if (usable.empty()) throw ReportError("no results with a language");
  const auto by_model = index_scores(usable);

  std::map<std::string, std::set<std::string>> datasets_for;  // language -> datasets
  for (const auto& s : usable) datasets_for[*s.language].insert(s.dataset_id);
  std::vector<std::string> languages;
  for (const auto& [lang, _] : datasets_for) languages.push_back(lang);
  std::stable_sort(languages.begin(), languages.end(), [](const std::string& a, const std::string& b) {
    return language_order(a) < language_order(b);
  });
  for (const auto& l : languages) board.columns.push_back(upper(l));

  for (const auto& [model, cells] : by_model) {
    std::vector<std::string> missing;
    std::vector<const DatasetScore*> used;
    std::map<std::string, double> columns;
    std::vector<double> lang_means;
    for (const auto& lang : languages) {
      std::vector<double> values;
      for (const auto& d : datasets_for[lang]) {
        const auto it = cells.find({d, lang});
        if (it == cells.end()) {
          missing.push_back(fmt::format("{}.{}", d, lang));
          continue;
        }
        used.push_back(it->second);
        values.push_back(it->second->wer_percent);
      }
      if (!values.empty()) {
        columns[upper(lang)] = mean(values);
        lang_means.push_back(columns[upper(lang)]);
      }
    }
    if (!missing.empty()) {
      board.warnings.push_back(fmt::format("{}: excluded, no result for {}", model, fmt::join(missing, ", ")));
      continue;
    }
    LeaderboardRow row = make_row(model, registry, used);
    row.avg_wer = mean(lang_means);
    row.per_column_wer = std::move(columns);
    board.rows.push_back(std::move(row));
  }
  if (board.rows.empty()) throw ReportError("no results: every model is missing a language");
  rank(board.rows);
  return board;
}

Leaderboard aggregate_results(const std::vector<EvalResult>& results, Track track, const ModelRegistry& registry) {
  std::vector<DatasetScore> scores;
  std::vector<std::string> warnings;
  for (const auto& r : results) {
    if (r.track != track) continue;
    if (r.status != RunStatus::completed) {
      warnings.push_back(fmt::format("{} on {}: excluded, run {}", r.model_id, r.dataset_id, to_string(r.status)));
      continue;
    }
    if (!r.wer) {
      warnings.push_back(fmt::format("{} on {}: excluded, nothing scored", r.model_id, r.dataset_id));
      continue;
    }
    for (auto& s : summarize(r)) scores.push_back(std::move(s));
  }
  if (scores.empty()) throw ReportError(fmt::format("no results for track {}", to_string(track)));
  Leaderboard board = track == Track::multilingual ? aggregate_multilingual(scores, registry)
                                                   : aggregate_track(scores, registry, track);
  board.warnings.insert(board.warnings.begin(), warnings.begin(), warnings.end());
  return board;
}

LoadedResults load_results_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw IoError(fmt::format("results directory not found: {}", dir.string()));
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  LoadedResults loaded;
  for (const auto& f : files) {
    try {
      loaded.results.push_back(load_result(f));
    } catch (const ReportError& e) {
      loaded.warnings.push_back(fmt::format("skipped {}: {}", f.string(), e.what()));
    }
  }
  return loaded;
}

}  // namespace asrbench
