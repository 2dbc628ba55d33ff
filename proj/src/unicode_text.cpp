// Case and punctuation stripping on top of ICU character properties.

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "asrbench/error.hpp"
#include "asrbench/normalizer.hpp"

namespace asrbench {
namespace {

const icu::Normalizer2& nfkc() {
  static const icu::Normalizer2* instance = [] {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* n = icu::Normalizer2::getNFKCInstance(status);
    if (U_FAILURE(status)) throw Error("ICU NFKC normalizer unavailable");
    return n;
  }();
  return *instance;
}

const icu::Normalizer2& nfkd() {
  static const icu::Normalizer2* instance = [] {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* n = icu::Normalizer2::getNFKDInstance(status);
    if (U_FAILURE(status)) throw Error("ICU NFKD normalizer unavailable");
    return n;
  }();
  return *instance;
}

icu::UnicodeString apply(const icu::Normalizer2& form, const icu::UnicodeString& s) {
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString out = form.normalize(s, status);
  if (U_FAILURE(status)) throw Error("ICU normalization failed");
  return out;
}

// NFKC, lowercase, NFKC again: lowercasing can produce sequences that are no
// longer in NFKC.
icu::UnicodeString fold(std::string_view text) {
  icu::UnicodeString s = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  s = apply(nfkc(), s);
  s.toLower(icu::Locale::getRoot());
  return apply(nfkc(), s);
}

// Latin letters that carry no decomposition but have a plain ASCII spelling.
const char* ascii_letter(UChar32 c) {
  switch (c) {
    case 0x00DF: return "ss";  // ß
    case 0x00E6: return "ae";  // æ
    case 0x0153: return "oe";  // œ
    case 0x00F8: return "o";   // ø
    case 0x0142: return "l";   // ł
    case 0x0111: return "d";   // đ
    case 0x00F0: return "d";   // ð
    case 0x00FE: return "th";  // þ
    case 0x0131: return "i";   // ı
    default: return nullptr;
  }
}

bool is_apostrophe(UChar32 c) {
  return c == '\'' || c == 0x2019 || c == 0x2018 || c == 0x02BC || c == 0x2032;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string collapse_spaces(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  for (char c : s) {
    if (c == ' ') {
      pending = !out.empty();
      continue;
    }
    if (pending) out += ' ';
    pending = false;
    out += c;
  }
  return out;
}

std::string strip_english(std::string_view text) {
  const icu::UnicodeString decomposed = apply(nfkd(), fold(text));
  std::string ascii;
  ascii.reserve(static_cast<std::size_t>(decomposed.length()));
  for (int32_t i = 0; i < decomposed.length();) {
    const UChar32 c = decomposed.char32At(i);
    i += U16_LENGTH(c);
    if (c < 0x80) {
      const char ch = static_cast<char>(c);
      if ((ch >= 'a' && ch <= 'z') || is_digit(ch) || ch == '\'' || ch == ',') {
        ascii += ch;
      } else if (ch >= 'A' && ch <= 'Z') {
        ascii += static_cast<char>(ch - 'A' + 'a');
      } else {
        ascii += ' ';
      }
      continue;
    }
    const int8_t type = u_charType(c);
    if ((U_MASK(type) & U_GC_M_MASK) != 0 || type == U_FORMAT_CHAR) continue;
    if (is_apostrophe(c)) {
      ascii += '\'';
    } else if (type == U_DECIMAL_DIGIT_NUMBER) {
      ascii += static_cast<char>('0' + u_charDigitValue(c));
    } else if (const char* letters = ascii_letter(c)) {
      ascii += letters;
    } else {
      ascii += ' ';
    }
  }

  // A comma is a digit-group separator when it sits between a digit and exactly
  // three digits ("1,000,000"); every other comma is punctuation.
  std::string out;
  out.reserve(ascii.size());
  for (std::size_t i = 0; i < ascii.size(); ++i) {
    if (ascii[i] != ',') {
      out += ascii[i];
      continue;
    }
    const bool group = i > 0 && is_digit(ascii[i - 1]) && i + 3 < ascii.size() && is_digit(ascii[i + 1]) &&
                       is_digit(ascii[i + 2]) && is_digit(ascii[i + 3]) &&
                       (i + 4 == ascii.size() || !is_digit(ascii[i + 4]));
    if (!group) out += ' ';
  }
  return collapse_spaces(out);
}

std::string strip_basic_once(std::string_view text) {
  const icu::UnicodeString folded = fold(text);
  icu::UnicodeString kept;
  for (int32_t i = 0; i < folded.length();) {
    const UChar32 c = folded.char32At(i);
    i += U16_LENGTH(c);
    const int8_t type = u_charType(c);
    if (type == U_FORMAT_CHAR) continue;
    const auto mask = U_MASK(type);
    const bool word_char = (mask & (U_GC_L_MASK | U_GC_M_MASK | U_GC_N_MASK)) != 0;
    kept.append(word_char && !u_isUWhiteSpace(c) ? c : UChar32{' '});
  }
  std::string utf8;
  kept.toUTF8String(utf8);
  return collapse_spaces(utf8);
}

std::string strip_basic(std::string_view text) {
  // Removing a character can let its neighbours compose under NFKC, so iterate
  // to a fixed point. In practice the second pass confirms the first.
  std::string current = strip_basic_once(text);
  for (int pass = 0; pass < 4; ++pass) {
    std::string next = strip_basic_once(current);
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

}  // namespace

std::string strip_punct_case(std::string_view text, NormalizationMode mode) {
  return mode == NormalizationMode::english_full ? strip_english(text) : strip_basic(text);
}

}  // namespace asrbench
