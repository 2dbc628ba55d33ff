#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "asrbench/digest.hpp"
#include "asrbench/error.hpp"
#include "asrbench/normalizer.hpp"

namespace asrbench {
namespace detail {
std::string_view builtin_spelling_tsv();
std::string_view builtin_fillers_txt();
std::string_view builtin_contractions_tsv();
}  // namespace detail

namespace {

constexpr std::string_view kSpellingFile = "spelling.tsv";
constexpr std::string_view kFillersFile = "fillers.txt";
constexpr std::string_view kContractionsFile = "contractions.tsv";

bool is_lower_word(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < 'a' || c > 'z') return false;
  }
  return true;
}

bool is_contraction_key(std::string_view s) {
  bool letter = false;
  for (char c : s) {
    if (c >= 'a' && c <= 'z') {
      letter = true;
    } else if (c != '\'') {
      return false;
    }
  }
  return letter;
}

struct TableLine {
  std::size_t number;
  std::string_view text;
};

// Non-comment, non-blank lines with CR stripped.
std::vector<TableLine> table_lines(std::string_view data) {
  std::vector<TableLine> lines;
  std::size_t number = 0;
  while (!data.empty()) {
    ++number;
    const auto nl = data.find('\n');
    std::string_view line = data.substr(0, nl);
    data = nl == std::string_view::npos ? std::string_view{} : data.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    lines.push_back({number, line});
  }
  return lines;
}

[[noreturn]] void fail(std::string_view file, std::size_t line, std::string_view what) {
  throw RulesError(fmt::format("{}:{}: {}", file, line, what));
}

std::pair<std::string_view, std::string_view> split_pair(std::string_view file, const TableLine& line) {
  const auto tab = line.text.find('\t');
  if (tab == std::string_view::npos || line.text.find('\t', tab + 1) != std::string_view::npos) {
    fail(file, line.number, "expected exactly one tab-separated key and value");
  }
  return {line.text.substr(0, tab), line.text.substr(tab + 1)};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RulesError(fmt::format("cannot read rules file: {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string_view to_string(NormalizationMode mode) {
  return mode == NormalizationMode::english_full ? "english_full" : "basic";
}

NormalizationMode parse_normalization_mode(std::string_view name) {
  if (name == "english_full") return NormalizationMode::english_full;
  if (name == "basic") return NormalizationMode::basic;
  throw RulesError(fmt::format("unknown normalization mode: {}", name));
}

NormalizationRules NormalizationRules::builtin_english() {
  static const NormalizationRules rules = from_tables(
      detail::builtin_spelling_tsv(), detail::builtin_fillers_txt(), detail::builtin_contractions_tsv());
  return rules;
}

NormalizationRules NormalizationRules::basic(std::string language) {
  NormalizationRules rules;
  rules.mode_ = NormalizationMode::basic;
  rules.language_ = std::move(language);
  rules.id_ = "basic-v1";
  return rules;
}

NormalizationRules NormalizationRules::as_basic(std::string language) const {
  NormalizationRules rules = *this;
  rules.mode_ = NormalizationMode::basic;
  rules.language_ = std::move(language);
  rules.id_ = "basic-v1";
  return rules;
}

NormalizationRules NormalizationRules::load(const std::filesystem::path& dir) {
  return from_tables(read_file(dir / kSpellingFile), read_file(dir / kFillersFile),
                     read_file(dir / kContractionsFile));
}

NormalizationRules NormalizationRules::from_tables(std::string_view spelling_tsv,
                                                   std::string_view fillers_txt,
                                                   std::string_view contractions_tsv) {
  NormalizationRules rules;

  for (const auto& line : table_lines(fillers_txt)) {
    if (!is_lower_word(line.text)) fail(kFillersFile, line.number, "filler must be a lowercase word [a-z]+");
    rules.fillers_.emplace(line.text);
  }
  for (std::string_view required : {"uh", "mhm"}) {
    if (!rules.fillers_.contains(required)) {
      throw RulesError(fmt::format("{}: filler set must contain \"{}\"", kFillersFile, required));
    }
  }

  for (const auto& line : table_lines(spelling_tsv)) {
    const auto [key, value] = split_pair(kSpellingFile, line);
    if (!is_lower_word(key) || !is_lower_word(value)) {
      fail(kSpellingFile, line.number, "spelling entries must be lowercase single words [a-z]+");
    }
    if (key == value) fail(kSpellingFile, line.number, "spelling entry maps a word to itself");
    if (rules.fillers_.contains(key) || rules.fillers_.contains(value) || is_number_word(key) ||
        is_number_word(value)) {
      fail(kSpellingFile, line.number, "spelling entries must not be fillers or number words");
    }
    if (!rules.spelling_.emplace(key, value).second) {
      fail(kSpellingFile, line.number, fmt::format("duplicate spelling key: {}", key));
    }
  }
  // Single-pass replacement is only idempotent when no output is itself rewritten.
  for (const auto& [key, value] : rules.spelling_) {
    if (rules.spelling_.contains(value)) {
      throw RulesError(fmt::format("{}: canonical spelling \"{}\" is also a variant key", kSpellingFile, value));
    }
  }

  for (const auto& line : table_lines(contractions_tsv)) {
    const auto [key, value] = split_pair(kContractionsFile, line);
    if (!is_contraction_key(key)) fail(kContractionsFile, line.number, "contraction key must match [a-z']+");
    std::vector<std::string> expansion;
    std::string_view rest = value;
    while (!rest.empty()) {
      const auto sp = rest.find(' ');
      std::string_view word = rest.substr(0, sp);
      rest = sp == std::string_view::npos ? std::string_view{} : rest.substr(sp + 1);
      if (!is_lower_word(word)) {
        fail(kContractionsFile, line.number, "expansion must be single-space separated words [a-z]+");
      }
      expansion.emplace_back(word);
    }
    if (expansion.empty()) fail(kContractionsFile, line.number, "empty expansion");
    if (!rules.contractions_.emplace(key, std::move(expansion)).second) {
      fail(kContractionsFile, line.number, fmt::format("duplicate contraction key: {}", key));
    }
  }

  std::string material;
  for (auto [name, data] : {std::pair{kSpellingFile, spelling_tsv}, std::pair{kFillersFile, fillers_txt},
                            std::pair{kContractionsFile, contractions_tsv}}) {
    material += fmt::format("{}\n{}\n", name, data.size());
    material += data;
  }
  rules.tables_digest_ = sha256_hex(material);
  rules.id_ = "english_full-" + rules.tables_digest_.substr(0, 16);
  return rules;
}

}  // namespace asrbench
