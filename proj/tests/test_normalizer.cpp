#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "asrbench/error.hpp"
#include "asrbench/metrics.hpp"
#include "asrbench/normalizer.hpp"
#include "support/fixtures.hpp"
#include "support/random_text.hpp"

using namespace asrbench;
using asrbench::testing::perturb_case_and_punct;
using asrbench::testing::random_utterance;

namespace {

const NormalizationRules& english() {
  static const NormalizationRules rules = NormalizationRules::builtin_english();
  return rules;
}

std::vector<std::string> norm(std::string_view text) { return normalize(text, english()).tokens; }

struct GoldenCase {
  std::string mode;
  std::string input;
  std::string expected;
};

std::vector<GoldenCase> load_golden() {
  std::ifstream in(std::string(ASRBENCH_TEST_DATA) + "/normalizer_golden.tsv");
  std::vector<GoldenCase> cases;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    const auto a = line.find('\t');
    const auto b = line.rfind('\t');
    cases.push_back({line.substr(0, a), line.substr(a + 1, b - a - 1), line.substr(b + 1)});
  }
  return cases;
}

}  // namespace

TEST(NormalizerGolden, EveryCaseMatches) {
  const auto cases = load_golden();
  ASSERT_GE(cases.size(), 30u);
  const auto basic = NormalizationRules::basic("de");
  for (const auto& c : cases) {
    const auto& rules = c.mode == "basic" ? basic : english();
    EXPECT_EQ(normalize(c.input, rules).joined(), c.expected) << "input: " << c.input;
  }
}

TEST(NormalizerGolden, ZeroAndDigitNormalizeIdentically) {
  EXPECT_EQ(norm("zero"), norm("0"));
  EXPECT_EQ(norm("Zero."), std::vector<std::string>{"0"});
}

TEST(NormalizerGolden, FillersUhAndMhmAreRemoved) {
  EXPECT_TRUE(norm("uh").empty());
  EXPECT_TRUE(norm("mhm").empty());
  EXPECT_EQ(norm("so uh I think mhm yes"), (std::vector<std::string>{"so", "i", "think", "yes"}));
}

TEST(StripPunctCase, EnglishOutputAlphabet) {
  std::mt19937 rng(7);
  const std::vector<std::string> pieces = {"A", "b", "É", "ß", "1", ",", "'", "’", "-", "—", " ", "\t", "中",
                                           "ж", "😀", "​", "٣", "Ⅻ", "ﬁ", "?", "!", "\"", "000", ",1"};
  for (int i = 0; i < 500; ++i) {
    std::string s;
    const int len = static_cast<int>(rng() % 12);
    for (int j = 0; j < len; ++j) s += pieces[rng() % pieces.size()];
    const std::string out = strip_punct_case(s, NormalizationMode::english_full);
    for (char c : out) {
      EXPECT_TRUE((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '\'' || c == ' ') << s;
    }
    EXPECT_EQ(out.find("  "), std::string::npos);
    if (!out.empty()) {
      EXPECT_NE(out.front(), ' ');
      EXPECT_NE(out.back(), ' ');
    }
  }
}

TEST(StripPunctCase, ThousandsCommaOnlyBetweenDigitGroups) {
  EXPECT_EQ(strip_punct_case("1,000,000", NormalizationMode::english_full), "1000000");
  EXPECT_EQ(strip_punct_case("1,00", NormalizationMode::english_full), "1 00");
  EXPECT_EQ(strip_punct_case("1,0000", NormalizationMode::english_full), "1 0000");
  EXPECT_EQ(strip_punct_case("a,000", NormalizationMode::english_full), "a 000");
}

TEST(StripPunctCase, BasicKeepsAllScriptsAndDropsFormatChars) {
  EXPECT_EQ(strip_punct_case("Привет, мир!", NormalizationMode::basic), "привет мир");
  EXPECT_EQ(strip_punct_case("zero​width", NormalizationMode::basic), "zerowidth");
  EXPECT_EQ(strip_punct_case("НОМЕР 5", NormalizationMode::basic), "номер 5");
}

TEST(Contractions, ExpansionAndApostropheRemoval) {
  const std::vector<std::string> in = {"won't", "o'clock", "they're", "gon'na"};
  EXPECT_EQ(expand_contractions(in, english()),
            (std::vector<std::string>{"will", "not", "oclock", "they", "are", "going", "to"}));
  const std::vector<std::string> only_apostrophes = {"'", "''"};
  EXPECT_TRUE(expand_contractions(only_apostrophes, english()).empty());
}

TEST(Fillers, RemovesOnlyWholeTokens) {
  const std::vector<std::string> in = {"um", "umbrella", "uh", "huh"};
  EXPECT_EQ(remove_fillers(in, english()), (std::vector<std::string>{"umbrella", "huh"}));
}

TEST(Spelling, SinglePassReplacement) {
  const std::vector<std::string> in = {"colour", "colourful", "color", "organise"};
  EXPECT_EQ(standardize_spelling(in, english()), (std::vector<std::string>{"color", "colorful", "color", "organize"}));
}

TEST(Rules, BuiltinMatchesRulesDirectory) {
  const auto loaded = NormalizationRules::load(ASRBENCH_RULES_DIR);
  EXPECT_EQ(loaded.id(), english().id());
  EXPECT_EQ(loaded.spelling_map(), english().spelling_map());
  EXPECT_EQ(english().mode(), NormalizationMode::english_full);
  EXPECT_TRUE(english().id().starts_with("english_full-"));
  EXPECT_EQ(english().id().size(), std::string("english_full-").size() + 16);
}

TEST(Rules, IdChangesWithTables) {
  const auto a = NormalizationRules::from_tables("colour\tcolor\n", "uh\nmhm\n", "can't\tcan not\n");
  const auto b = NormalizationRules::from_tables("colour\tcolor\n", "uh\nmhm\num\n", "can't\tcan not\n");
  const auto a2 = NormalizationRules::from_tables("colour\tcolor\n", "uh\nmhm\n", "can't\tcan not\n");
  EXPECT_NE(a.id(), b.id());
  EXPECT_EQ(a.id(), a2.id());
  EXPECT_EQ(NormalizationRules::basic().id(), "basic-v1");
  EXPECT_EQ(a.as_basic("fr").id(), "basic-v1");
  EXPECT_EQ(a.as_basic("fr").language(), "fr");
}

TEST(Rules, RejectsInvalidTables) {
  auto expect_error = [](std::string_view spelling, std::string_view fillers, std::string_view contractions,
                         const std::string& fragment) {
    try {
      (void)NormalizationRules::from_tables(spelling, fillers, contractions);
      ADD_FAILURE() << "expected RulesError containing " << fragment;
    } catch (const RulesError& e) {
      EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    }
  };
  expect_error("# header\nColour\tcolor\n", "uh\nmhm\n", "", "spelling.tsv:2");
  expect_error("colour\tcolor\ncolor\tkolor\n", "uh\nmhm\n", "", "also a variant key");
  expect_error("colour\tcol-or\n", "uh\nmhm\n", "", "spelling.tsv:1");
  expect_error("twenty\ttwentie\n", "uh\nmhm\n", "", "number words");
  expect_error("", "uh\n", "", "mhm");
  expect_error("", "uh\nmhm\nUm\n", "", "fillers.txt:3");
  expect_error("", "uh\nmhm\n", "can't\tcan't not\n", "contractions.tsv:1");
  expect_error("a\tb\tc\n", "uh\nmhm\n", "", "exactly one tab");
  EXPECT_THROW((void)NormalizationRules::load("/nonexistent/rules"), RulesError);
  EXPECT_THROW((void)parse_normalization_mode("full"), RulesError);
}

TEST(Normalize, RecordsSourceHashAndRulesId) {
  const auto n = normalize("abc", english());
  EXPECT_EQ(n.source_hash, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(n.rules_id, english().id());
}

TEST(NormalizeProperty, IdempotentOnRandomCorpus) {
  std::mt19937 rng(20251008);
  for (int i = 0; i < 3000; ++i) {
    const std::string s = random_utterance(rng);
    const std::string once = normalize(s, english()).joined();
    ASSERT_EQ(normalize(once, english()).joined(), once) << "input: " << s;
    const auto basic = NormalizationRules::basic();
    const std::string b = normalize(s, basic).joined();
    ASSERT_EQ(normalize(b, basic).joined(), b) << "input: " << s;
  }
}

TEST(NormalizeProperty, CaseAndPunctuationDoNotChangeWer) {
  std::mt19937 rng(99);
  const std::vector<std::string> sentences = {"the quarterly results were strong",
                                              "we expect twenty five percent growth next year",
                                              "i can't believe it's already nineteen ninety nine",
                                              "please call me at five o'clock"};
  for (int i = 0; i < 400; ++i) {
    const auto& ref = sentences[rng() % sentences.size()];
    const auto hyp = perturb_case_and_punct(ref, rng);
    const auto r = norm(ref);
    const auto h = norm(hyp);
    const auto counts = align(r, h);
    EXPECT_EQ(counts.errors(), 0u) << ref << " | " << hyp;
  }
}
