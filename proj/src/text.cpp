#include "langid/text.hpp"

#include <unicode/uchar.h>
#include <unicode/uscript.h>
#include <unicode/utf8.h>

#include <algorithm>

#include "langid/error.hpp"

namespace langid {
namespace {

constexpr char32_t kReplacement = 0xFFFD;

bool is_nonprinting(char32_t cp) {
  switch (u_charType(static_cast<UChar32>(cp))) {
    case U_CONTROL_CHAR:   // Cc
    case U_FORMAT_CHAR:    // Cf
    case U_PRIVATE_USE_CHAR:  // Co
    case U_UNASSIGNED:     // Cn
      return true;
    default:
      return false;
  }
}

}  // namespace

std::u32string decode_utf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const int32_t length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    out.push_back(c < 0 ? kReplacement : static_cast<char32_t>(c));
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  uint8_t buf[U8_MAX_LENGTH];
  int32_t n = 0;
  UBool error = false;
  U8_APPEND(buf, n, U8_MAX_LENGTH, static_cast<UChar32>(cp), error);
  if (error) {
    n = 0;
    U8_APPEND_UNSAFE(buf, n, kReplacement);
  }
  out.append(reinterpret_cast<const char*>(buf), static_cast<size_t>(n));
}

std::string encode_utf8(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) append_utf8(out, cp);
  return out;
}

bool is_unicode_whitespace(char32_t cp) {
  return u_isUWhiteSpace(static_cast<UChar32>(cp));
}

std::string remove_nonprinting(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const int32_t length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0 || is_nonprinting(static_cast<char32_t>(c)) ||
        u_isUWhiteSpace(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    append_utf8(out, static_cast<char32_t>(c));
  }
  return out;
}

std::vector<int> expand_script(std::string_view iso15924) {
  if (iso15924 == "Hans" || iso15924 == "Hant") return {USCRIPT_HAN};
  if (iso15924 == "Jpan") {
    return {USCRIPT_HAN, USCRIPT_HIRAGANA, USCRIPT_KATAKANA};
  }
  if (iso15924 == "Kore") return {USCRIPT_HAN, USCRIPT_HANGUL};

  const std::string code(iso15924);
  const int value = u_getPropertyValueEnum(UCHAR_SCRIPT, code.c_str());
  // Zyyy/Zinh/Zzzz are not scripts a language can be written in.
  if (value == UCHAR_INVALID_CODE || value == USCRIPT_COMMON ||
      value == USCRIPT_INHERITED || value == USCRIPT_UNKNOWN) {
    throw Error(Errc::kUnknownScript, "unknown script code '" + code + "'");
  }
  // ICU also knows variant codes such as Latf that no character carries.
  const auto script = static_cast<UScriptCode>(value);
  const char* short_name = uscript_getShortName(script);
  if (short_name == nullptr || code != short_name ||
      uscript_getUsage(script) == USCRIPT_USAGE_NOT_ENCODED) {
    throw Error(Errc::kUnknownScript, "unknown script code '" + code + "'");
  }
  return {value};
}

bool has_script_char(std::string_view text, std::string_view iso15924) {
  const std::vector<int> wanted = expand_script(iso15924);
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const int32_t length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) continue;
    UErrorCode status = U_ZERO_ERROR;
    const UScriptCode script = uscript_getScript(c, &status);
    if (U_FAILURE(status)) continue;
    if (std::find(wanted.begin(), wanted.end(), script) != wanted.end()) {
      return true;
    }
  }
  return false;
}

}  // namespace langid
