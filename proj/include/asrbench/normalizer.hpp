#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace asrbench {

enum class NormalizationMode { english_full, basic };

std::string_view to_string(NormalizationMode mode);
// Throws RulesError on an unknown name.
NormalizationMode parse_normalization_mode(std::string_view name);

/// Immutable rule set shared by references and hypotheses.
///
/// English tables are loaded from three plain-text files (`spelling.tsv`,
/// `fillers.txt`, `contractions.tsv`); the rules id is derived from their
/// bytes, so two runs that agree on the id normalized text identically.
/// In basic mode the tables are carried but never consulted.
class NormalizationRules {
 public:
  // The seed tables compiled into the binary from data/rules/.
  static NormalizationRules builtin_english();
  static NormalizationRules basic(std::string language = "mul");
  // Reads the three table files from `dir`. Throws RulesError with the
  // offending file and line.
  static NormalizationRules load(const std::filesystem::path& dir);
  static NormalizationRules from_tables(std::string_view spelling_tsv,
                                        std::string_view fillers_txt,
                                        std::string_view contractions_tsv);

  NormalizationMode mode() const noexcept { return mode_; }
  const std::string& language() const noexcept { return language_; }
  const std::string& id() const noexcept { return id_; }
  const std::map<std::string, std::string, std::less<>>& spelling_map() const noexcept { return spelling_; }
  const std::set<std::string, std::less<>>& filler_set() const noexcept { return fillers_; }
  const std::map<std::string, std::vector<std::string>, std::less<>>& contraction_map() const noexcept {
    return contractions_;
  }

  // Same tables, basic mode, for tracks that must not apply English rules.
  NormalizationRules as_basic(std::string language) const;

 private:
  NormalizationRules() = default;

  NormalizationMode mode_ = NormalizationMode::english_full;
  std::string language_ = "en";
  std::string id_;
  std::string tables_digest_;
  std::map<std::string, std::string, std::less<>> spelling_;
  std::set<std::string, std::less<>> fillers_;
  std::map<std::string, std::vector<std::string>, std::less<>> contractions_;
};

struct NormalizedText {
  std::vector<std::string> tokens;
  std::string source_hash;  // sha256 of the raw input
  std::string rules_id;

  std::string joined() const;
  bool operator==(const NormalizedText&) const = default;
};

// Pipeline stages, exposed individually for testing and tooling.

/// NFKC, lowercase, then strip everything that is not part of a word.
///
/// english_full keeps only [a-z0-9'] (accents folded, digit-group commas such
/// as "1,000" joined); basic keeps letters, marks and numbers of any script and
/// turns punctuation, symbols and controls into spaces. Whitespace runs are
/// collapsed and the result trimmed.
std::string strip_punct_case(std::string_view text, NormalizationMode mode);

std::vector<std::string> split_whitespace(std::string_view text);
std::string join_tokens(std::span<const std::string> tokens);

// Expands table contractions and deletes any apostrophes left afterwards.
std::vector<std::string> expand_contractions(std::span<const std::string> tokens,
                                             const NormalizationRules& rules);
std::vector<std::string> remove_fillers(std::span<const std::string> tokens,
                                        const NormalizationRules& rules);
// Rewrites English cardinal number words as digit strings.
std::vector<std::string> canonicalize_numbers(std::span<const std::string> tokens);
std::vector<std::string> standardize_spelling(std::span<const std::string> tokens,
                                              const NormalizationRules& rules);

NormalizedText normalize(std::string_view text, const NormalizationRules& rules);

// True if `token` is one of the words the number grammar consumes.
bool is_number_word(std::string_view token);

}  // namespace asrbench
