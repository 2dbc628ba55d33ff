#include "asrbench/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "asrbench/adapters.hpp"
#include "asrbench/corpus.hpp"
#include "asrbench/error.hpp"
#include "asrbench/normalizer.hpp"
#include "asrbench/report.hpp"
#include "asrbench/runner.hpp"

namespace asrbench {
namespace {

constexpr const char* kDefaultOut = "results";
const std::vector<std::string> kTracks{"leaderboard", "multilingual", "longform"};

struct RunArgs {
  std::string manifest;
  std::string track;
  std::string adapter;
  std::string language;
  std::string rules;
  std::size_t batch_size = 64;
  std::vector<std::size_t> ladder;
  double timeout_s = 600.0;
  std::string out = kDefaultOut;
  std::string model;
};

struct ReportArgs {
  std::string in = kDefaultOut;
  std::string out;
  std::string track;
  std::string formats = "json,csv,md,html";
  std::string registry;
};

struct NormalizeArgs {
  std::string mode = "english_full";
  std::string rules;
  std::string language = "mul";
};

struct ValidateArgs {
  std::string manifest;
  std::string rules;
};

NormalizationRules load_rules(const std::string& dir) {
  return dir.empty() ? NormalizationRules::builtin_english() : NormalizationRules::load(dir);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  AdapterConfig config;
  DatasetManifest manifest;
  NormalizationRules rules = NormalizationRules::builtin_english();
  Track track;
  try {
    track = parse_track(a.track);
    config = AdapterConfig::parse(a.adapter);
    config.initial_batch_size = a.batch_size;
    config.backoff_ladder = a.ladder.empty() ? ladder_from(a.batch_size) : complete_ladder(a.ladder);
    config.timeout_s = a.timeout_s;
    config.validate();
    manifest = load_manifest(a.manifest);
    rules = load_rules(a.rules);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::unique_ptr<Adapter> adapter;
  try {
    adapter = make_adapter(config);
  } catch (const AdapterError& e) {
    err << "error: adapter: " << e.what() << "\n";
    return kExitAborted;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  RunOptions options;
  options.model_id = a.model;
  if (!a.language.empty()) options.language = a.language;
  options.out_dir = std::filesystem::path(a.out);
  try {
    options.warmup_s = warmup(*adapter);
  } catch (const AdapterError& e) {
    err << "error: warmup failed: " << e.what() << "\n";
    return kExitAborted;
  }

  EvalResult result;
  try {
    result = run_eval(*adapter, manifest, track, rules, config, options);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitAborted;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  const auto path = result_path(result, options.out_dir.value());
  out << fmt::format("{} {} {}: ", result.model_id, result.dataset_id, to_string(result.track));
  if (result.wer) {
    out << fmt::format("WER {:.2f}% ({}/{})", result.wer->percent(), result.wer->numerator, result.wer->denominator);
  } else {
    out << "WER -";
  }
  out << (result.rtfx ? fmt::format(", RTFx {:.2f}", result.rtfx->rtfx) : std::string(", RTFx -"));
  out << fmt::format(", {} scored, {} skipped, {}\n", result.per_sample.size(), result.skipped,
                     to_string(result.status));
  out << path.string() << "\n";
  if (result.status == RunStatus::aborted) {
    err << "error: run aborted: " << result.error.value_or("unknown error") << "\n";
    return kExitAborted;
  }
  return kExitOk;
}

int cmd_report(const ReportArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<ReportFormat> formats;
  Track track;
  ModelRegistry registry;
  try {
    track = parse_track(a.track);
    for (const auto& f : split_list(a.formats)) formats.push_back(parse_report_format(f));
    if (formats.empty()) throw ReportError("no report format given");
    if (!a.registry.empty()) registry = ModelRegistry::load(a.registry);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  Leaderboard board;
  try {
    const auto loaded = load_results_dir(a.in);
    for (const auto& w : loaded.warnings) err << "warning: " << w << "\n";
    board = aggregate_results(loaded.results, track, registry);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  for (const auto& w : board.warnings) err << "warning: " << w << "\n";

  const std::filesystem::path dir = std::filesystem::path(a.out.empty() ? a.in : a.out) / std::string(to_string(track));
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    err << "error: cannot create " << dir.string() << ": " << ec.message() << "\n";
    return kExitUsage;
  }
  for (const auto f : formats) {
    const auto path = dir / fmt::format("leaderboard.{}", extension(f));
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    const std::string doc = render(board, f);
    file.write(doc.data(), static_cast<std::streamsize>(doc.size()));
    if (!file) {
      err << "error: cannot write " << path.string() << "\n";
      return kExitUsage;
    }
    out << path.string() << "\n";
  }
  return kExitOk;
}

int cmd_normalize(const NormalizeArgs& a, std::istream& in, std::ostream& out, std::ostream& err) {
  std::optional<NormalizationRules> rules;
  try {
    const auto mode = parse_normalization_mode(a.mode);
    rules = load_rules(a.rules);
    if (mode == NormalizationMode::basic) rules = rules->as_basic(a.language);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out << normalize(line, *rules).joined() << "\n";
  }
  return kExitOk;
}

int cmd_validate(const ValidateArgs& a, std::ostream& out, std::ostream& err) {
  DatasetManifest manifest;
  std::optional<NormalizationRules> rules;
  try {
    manifest = load_manifest(a.manifest);
    rules = load_rules(a.rules);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  const ValidationReport report = validate_manifest(manifest, &*rules);
  for (const auto& issue : report.issues) {
    out << fmt::format("{}\t{}\t{}\t{}\n", issue.severity == IssueSeverity::error ? "error" : "warning",
                       issue.sample_id, issue.kind, issue.message);
  }
  out << fmt::format("{}: {} samples, {:.3f} h, {} errors, {} warnings\n", manifest.dataset_id,
                     manifest.samples.size(), manifest.total_duration_h(), report.error_count(),
                     report.warning_count());
  return report.error_count() == 0 ? kExitOk : kExitInvalid;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"ASR evaluation harness: normalization, WER, RTFx and leaderboards", "asrbench"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a TOML/INI file; flags override it");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Evaluate one model on one dataset");
  run_cmd->add_option("--manifest", run.manifest, "Dataset manifest (JSONL)")->required();
  run_cmd->add_option("--track", run.track, "Evaluation track")->required()->check(CLI::IsMember(kTracks));
  run_cmd->add_option("--adapter", run.adapter, "mock:PATH, subprocess:CMD or http:URL")->required();
  run_cmd->add_option("--language", run.language, "Only score samples in this language");
  run_cmd->add_option("--rules", run.rules, "Directory with spelling.tsv, fillers.txt, contractions.tsv");
  run_cmd->add_option("--batch-size", run.batch_size, "Initial batch size")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--ladder", run.ladder, "Backoff ladder, descending; completed down to 1")->delimiter(',');
  run_cmd->add_option("--timeout", run.timeout_s, "Adapter timeout in seconds")->capture_default_str();
  run_cmd->add_option("--out", run.out, "Results directory")->envname("ASRBENCH_OUT")->capture_default_str();
  run_cmd->add_option("--model", run.model, "Model id recorded in the result (default: adapter name)");

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Aggregate results into leaderboards");
  report_cmd->add_option("--in", report.in, "Results directory")->envname("ASRBENCH_OUT")->capture_default_str();
  report_cmd->add_option("--out", report.out, "Output directory (default: --in)");
  report_cmd->add_option("--track", report.track, "Track to report")->required()->check(CLI::IsMember(kTracks));
  report_cmd->add_option("--format", report.formats, "Comma list of json, csv, md, html")->capture_default_str();
  report_cmd->add_option("--registry", report.registry, "Model registry (JSONL of model cards)");

  NormalizeArgs norm;
  auto* norm_cmd = app.add_subcommand("normalize", "Normalize stdin lines to stdout");
  norm_cmd->add_option("--mode", norm.mode, "english_full or basic")->capture_default_str();
  norm_cmd->add_option("--rules", norm.rules, "Rules directory");
  norm_cmd->add_option("--language", norm.language, "Language recorded for basic mode")->capture_default_str();

  ValidateArgs validate;
  auto* validate_cmd = app.add_subcommand("validate", "Check a manifest");
  validate_cmd->add_option("--manifest", validate.manifest, "Dataset manifest (JSONL)")->required();
  validate_cmd->add_option("--rules", validate.rules, "Rules directory");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("asrbench");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*run_cmd) return cmd_run(run, out, err);
  if (*report_cmd) return cmd_report(report, out, err);
  if (*norm_cmd) return cmd_normalize(norm, in, out, err);
  if (*validate_cmd) return cmd_validate(validate, out, err);
  return kExitUsage;
}

}  // namespace asrbench
