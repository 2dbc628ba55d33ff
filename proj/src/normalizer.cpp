#include "asrbench/normalizer.hpp"

#include <algorithm>

#include "asrbench/digest.hpp"

namespace asrbench {

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\n' || text[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ' && text[j] != '\t' && text[j] != '\n' && text[j] != '\r') ++j;
    if (j > i) tokens.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return tokens;
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

std::string NormalizedText::joined() const { return join_tokens(tokens); }

std::vector<std::string> expand_contractions(std::span<const std::string> tokens,
                                             const NormalizationRules& rules) {
  const auto& table = rules.contraction_map();
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& token : tokens) {
    auto it = table.find(token);
    std::string bare;
    if (it == table.end()) {
      bare = token;
      std::erase(bare, '\'');
      // "gon'na" -> "gonna" must expand in the same pass, or a second
      // normalization would see a key the first one missed.
      it = table.find(bare);
    }
    if (it != table.end()) {
      out.insert(out.end(), it->second.begin(), it->second.end());
    } else if (!bare.empty()) {
      out.push_back(std::move(bare));
    }
  }
  return out;
}

std::vector<std::string> remove_fillers(std::span<const std::string> tokens, const NormalizationRules& rules) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& token : tokens) {
    if (!rules.filler_set().contains(token)) out.push_back(token);
  }
  return out;
}

std::vector<std::string> standardize_spelling(std::span<const std::string> tokens,
                                              const NormalizationRules& rules) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& token : tokens) {
    const auto it = rules.spelling_map().find(token);
    out.push_back(it == rules.spelling_map().end() ? token : it->second);
  }
  return out;
}

NormalizedText normalize(std::string_view text, const NormalizationRules& rules) {
  NormalizedText result;
  result.source_hash = sha256_hex(text);
  result.rules_id = rules.id();
  auto tokens = split_whitespace(strip_punct_case(text, rules.mode()));
  if (rules.mode() == NormalizationMode::english_full) {
    tokens = expand_contractions(tokens, rules);
    tokens = remove_fillers(tokens, rules);
    tokens = canonicalize_numbers(tokens);
    tokens = standardize_spelling(tokens, rules);
  }
  result.tokens = std::move(tokens);
  return result;
}

}  // namespace asrbench
