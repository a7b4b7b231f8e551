#include <doctest.h>

#include <random>

#include "langid/corpus.hpp"
#include "langid/text.hpp"
#include "test_util.hpp"

using langid::Errc;
using langid::LabeledLine;
using langid::parse_label;
using langid::remove_nonprinting;

TEST_CASE("remove_nonprinting replaces control characters") {
  CHECK(remove_nonprinting("a\ab") == "a b");
  CHECK(remove_nonprinting("a\tb\nc\rd") == "a b c d");
}

TEST_CASE("remove_nonprinting collapses and trims whitespace") {
  CHECK(remove_nonprinting("hello  world ") == "hello world");
  CHECK(remove_nonprinting("   ") == "");
  CHECK(remove_nonprinting("") == "");
  CHECK(remove_nonprinting(" x　y ") == "x y");
}

TEST_CASE("remove_nonprinting handles format, private-use and unassigned") {
  // U+200D ZERO WIDTH JOINER is Cf; the run of spaces collapses.
  CHECK(remove_nonprinting("a\u200Db\a\ac") == "a b c");
  CHECK(remove_nonprinting("x\u00ADy") == "x y");     // soft hyphen, Cf
  CHECK(remove_nonprinting("x\uE000y") == "x y");     // private use, Co
  CHECK(remove_nonprinting("x\xF4\x8F\xBF\xBFy") == "x y");  // U+10FFFF, Cn
  CHECK(remove_nonprinting("x\xFFy") == "x y");            // ill-formed byte
}

TEST_CASE("remove_nonprinting keeps letters from every script") {
  CHECK(remove_nonprinting("привет мир") == "привет мир");
  CHECK(remove_nonprinting("中文 字") == "中文 字");
  CHECK(remove_nonprinting("e\u0301") == "e\u0301");  // combining mark stays
}

namespace {

std::string random_text(std::mt19937& rng) {
  static const char* pieces[] = {"a", " ", "  ", "\t", "\a", "\u200D", "\u00E9", "\u043F",
                                 "\u4E2D", "\uE000", "\xFF", "\u00A0", "1", "!", "\n", "\u0301"};
  std::uniform_int_distribution<int> len(0, 12);
  std::uniform_int_distribution<size_t> pick(0, std::size(pieces) - 1);
  std::string s;
  for (int i = len(rng); i > 0; --i) s += pieces[pick(rng)];
  return s;
}

}  // namespace

TEST_CASE("remove_nonprinting is idempotent and leaves no Cc/Cf") {
  std::mt19937 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const std::string x = random_text(rng);
    const std::string once = remove_nonprinting(x);
    CHECK(remove_nonprinting(once) == once);
    for (char32_t cp : langid::decode_utf8(once)) {
      CHECK(cp >= 0x20);
      CHECK(cp != 0x200D);
    }
    CHECK((once.empty() || (once.front() != ' ' && once.back() != ' ')));
    CHECK(once.find("  ") == std::string::npos);
  }
}

TEST_CASE("script_filter examples") {
  CHECK(langid::script_filter(LabeledLine{"hello", parse_label("eng_Latn")}));
  CHECK_FALSE(langid::script_filter(LabeledLine{"12345 !!", parse_label("eng_Latn")}));
  CHECK(langid::script_filter(LabeledLine{"привет hello", parse_label("bul_Cyrl")}));
  CHECK_FALSE(langid::script_filter(LabeledLine{"hello", parse_label("bul_Cyrl")}));
}

TEST_CASE("composite scripts expand to their Unicode scripts") {
  CHECK(langid::has_script_char("中文", "Hans"));
  CHECK(langid::has_script_char("中文", "Hant"));
  CHECK(langid::has_script_char("ひらがな", "Jpan"));
  CHECK(langid::has_script_char("カタカナ", "Jpan"));
  CHECK(langid::has_script_char("漢字", "Jpan"));
  CHECK(langid::has_script_char("한국어", "Kore"));
  CHECK(langid::has_script_char("韓國", "Kore"));
  CHECK_FALSE(langid::has_script_char("ひらがな", "Hans"));
  CHECK(langid::has_script_char("한국어", "Hang"));
  CHECK(langid::has_script_char("ᱥᱟᱱᱛᱟᱲᱤ", "Olck"));
}

TEST_CASE("Common and Inherited characters never satisfy the filter") {
  // Digits, punctuation, and a lone combining acute accent.
  CHECK_FALSE(langid::has_script_char("0123 ,.;!? \u0301", "Latn"));
  CHECK_FALSE(langid::has_script_char("", "Latn"));
}

TEST_CASE("unknown or non-language script codes raise unknown-script") {
  for (const char* code : {"Xxxx", "Zyyy", "Zinh", "Zzzz", "Latf", "latn"}) {
    CAPTURE(code);
    CHECK(test::error_code([&] { langid::expand_script(code); }) == Errc::kUnknownScript);
  }
  CHECK(test::error_code([&] {
          langid::script_filter(LabeledLine{"abc", parse_label("eng_Qaaa")});
        }) == Errc::kUnknownScript);
}

TEST_CASE("script_filter never flips from true to false when text is appended") {
  std::mt19937 rng(11);
  const char* suffixes[] = {"123", "\u4E2D\u6587", "\u043F\u0440\u0438", "abc", "!!", "\u3072\u3089", "\u0301"};
  const char* scripts[] = {"Latn", "Cyrl", "Hans", "Jpan"};
  for (int i = 0; i < 500; ++i) {
    std::string text = random_text(rng);
    for (const char* script : scripts) {
      bool before = langid::has_script_char(text, script);
      for (const char* s : suffixes) {
        const bool after = langid::has_script_char(text + s, script);
        if (before) CHECK(after);
      }
    }
  }
}

TEST_CASE("utf8 decode/encode round trip") {
  const std::string s = "aé中\U0001F600";
  CHECK(langid::decode_utf8(s).size() == 4);
  CHECK(langid::encode_utf8(langid::decode_utf8(s)) == s);
}
