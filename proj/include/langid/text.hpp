#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace langid {

/// Decodes UTF-8 into code points. Ill-formed sequences decode to U+FFFD.
std::u32string decode_utf8(std::string_view text);
void append_utf8(std::string& out, char32_t cp);
std::string encode_utf8(std::u32string_view cps);

bool is_unicode_whitespace(char32_t cp);

/// Replaces every code point of general category Cc, Cf, Co or Cn with a
/// space, collapses whitespace runs to one space and trims both ends.
/// Ill-formed UTF-8 is treated like a non-printing character.
std::string remove_nonprinting(std::string_view text);

/// Unicode Script property values (ICU UScriptCode) that count as the given
/// ISO 15924 code. Composite codes expand: Hans/Hant -> Han,
/// Jpan -> Han+Hiragana+Katakana, Kore -> Han+Hangul. Throws
/// Error(kUnknownScript) for codes with no entry.
std::vector<int> expand_script(std::string_view iso15924);

/// True iff some code point of `text` has a Script property in
/// expand_script(iso15924). Common and Inherited never count.
bool has_script_char(std::string_view text, std::string_view iso15924);

}  // namespace langid
