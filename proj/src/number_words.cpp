// English cardinal number words -> digit strings.
//
// Grammar (after case/punctuation stripping, hyphens are already spaces):
//   number  := "zero" | (group scale ["and"])* [group]
//   group   := below100 ["hundred" [["and"] below100]] | small-digit-string (only before a scale)
//   below100:= unit | teen | tens [unit]
//   scale   := "thousand" | "million" | "billion", strictly decreasing within a number
// "X hundred" with X >= 10 ("nineteen hundred") is accepted only as the leading group.

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>

#include "asrbench/normalizer.hpp"

namespace asrbench {
namespace {

using Tokens = std::span<const std::string>;

const std::unordered_map<std::string_view, int>& units() {
  static const std::unordered_map<std::string_view, int> m = {
      {"one", 1}, {"two", 2}, {"three", 3}, {"four", 4}, {"five", 5},
      {"six", 6}, {"seven", 7}, {"eight", 8}, {"nine", 9}};
  return m;
}

const std::unordered_map<std::string_view, int>& teens() {
  static const std::unordered_map<std::string_view, int> m = {
      {"ten", 10},     {"eleven", 11},  {"twelve", 12},    {"thirteen", 13},  {"fourteen", 14},
      {"fifteen", 15}, {"sixteen", 16}, {"seventeen", 17}, {"eighteen", 18}, {"nineteen", 19}};
  return m;
}

const std::unordered_map<std::string_view, int>& tens() {
  static const std::unordered_map<std::string_view, int> m = {
      {"twenty", 20}, {"thirty", 30},  {"forty", 40},  {"fifty", 50},
      {"sixty", 60},  {"seventy", 70}, {"eighty", 80}, {"ninety", 90}};
  return m;
}

std::optional<std::int64_t> scale_of(std::string_view token) {
  if (token == "thousand") return 1'000;
  if (token == "million") return 1'000'000;
  if (token == "billion") return 1'000'000'000;
  return std::nullopt;
}

std::optional<int> lookup(const std::unordered_map<std::string_view, int>& table, std::string_view token) {
  const auto it = table.find(token);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

// "1".."999" without a leading zero.
std::optional<std::int64_t> small_digit_string(std::string_view token) {
  if (token.empty() || token.size() > 3 || token.front() == '0') return std::nullopt;
  std::int64_t v = 0;
  for (char c : token) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + (c - '0');
  }
  return v;
}

std::optional<std::int64_t> take_below_hundred(Tokens t, std::size_t& i) {
  if (i >= t.size()) return std::nullopt;
  if (auto u = lookup(units(), t[i])) {
    ++i;
    return *u;
  }
  if (auto teen = lookup(teens(), t[i])) {
    ++i;
    return *teen;
  }
  if (auto ten = lookup(tens(), t[i])) {
    ++i;
    if (i < t.size()) {
      if (auto u = lookup(units(), t[i])) {
        ++i;
        return *ten + *u;
      }
    }
    return *ten;
  }
  return std::nullopt;
}

bool starts_below_hundred(Tokens t, std::size_t i) {
  return i < t.size() && (units().contains(t[i]) || teens().contains(t[i]) || tens().contains(t[i]));
}

std::optional<std::int64_t> take_group(Tokens t, std::size_t& i, bool leading) {
  const auto lead = take_below_hundred(t, i);
  if (!lead) return std::nullopt;
  if (i < t.size() && t[i] == "hundred" && (*lead < 10 || leading)) {
    ++i;
    std::int64_t value = *lead * 100;
    std::size_t j = i;
    if (j < t.size() && t[j] == "and") ++j;
    if (auto rest = take_below_hundred(t, j)) {
      value += *rest;
      i = j;
    }
    return value;
  }
  return lead;
}

// Longest number starting at i; on success i is advanced past it.
std::optional<std::int64_t> take_number(Tokens t, std::size_t& i) {
  if (i < t.size() && t[i] == "zero") {
    ++i;
    return 0;
  }
  std::int64_t total = 0;
  std::int64_t last_scale = INT64_MAX;
  bool any = false;
  // Where the number ends if the next group turns out not to belong to it; this
  // sits before an absorbed "and" so the connective is handed back.
  std::size_t fallback = i;
  while (i < t.size()) {
    std::optional<std::int64_t> group;
    if (auto digits = small_digit_string(t[i])) {
      const auto next_scale = i + 1 < t.size() ? scale_of(t[i + 1]) : std::nullopt;
      if (next_scale && *next_scale < last_scale) {
        group = digits;
        ++i;
      }
    } else {
      group = take_group(t, i, !any);
    }
    if (!group) {
      i = fallback;
      break;
    }
    if (i < t.size()) {
      if (auto scale = scale_of(t[i])) {
        if (*scale >= last_scale) {
          // "one million two million": the second group starts a new number.
          i = fallback;
          break;
        }
        total += *group * *scale;
        last_scale = *scale;
        any = true;
        ++i;
        fallback = i;
        if (i < t.size() && t[i] == "and" && starts_below_hundred(t, i + 1)) ++i;
        continue;
      }
    }
    total += *group;
    any = true;
    break;
  }
  if (!any) return std::nullopt;
  return total;
}

}  // namespace

bool is_number_word(std::string_view token) {
  return token == "zero" || token == "hundred" || scale_of(token).has_value() || units().contains(token) ||
         teens().contains(token) || tens().contains(token);
}

std::vector<std::string> canonicalize_numbers(std::span<const std::string> tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t j = i;
    if (auto value = take_number(tokens, j); value && j > i) {
      out.push_back(std::to_string(*value));
      i = j;
      continue;
    }
    out.push_back(tokens[i]);
    ++i;
  }
  return out;
}

}  // namespace asrbench
