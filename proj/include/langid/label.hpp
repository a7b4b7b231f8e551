#pragma once

#include <compare>
#include <functional>
#include <string>
#include <string_view>

namespace langid {

inline constexpr std::string_view kLabelPrefix = "__label__";

/// An individual language plus the script it is written in, e.g. `eng_Latn`.
/// `language` is an ISO 639-3 code (three lowercase ASCII letters) and
/// `script` an ISO 15924 code (four letters, title-case).
struct LanguageLabel {
  std::string language;
  std::string script;

  std::string str() const { return language + "_" + script; }

  friend auto operator<=>(const LanguageLabel&, const LanguageLabel&) = default;
  friend bool operator==(const LanguageLabel&, const LanguageLabel&) = default;
};

/// Parses `xxx_Yyyy`, optionally preceded by `__label__`.
/// Throws Error(kMalformedLabel) on anything else.
LanguageLabel parse_label(std::string_view raw);

bool is_valid_label(std::string_view raw) noexcept;

}  // namespace langid

template <>
struct std::hash<langid::LanguageLabel> {
  std::size_t operator()(const langid::LanguageLabel& l) const noexcept {
    return std::hash<std::string>{}(l.str());
  }
};
