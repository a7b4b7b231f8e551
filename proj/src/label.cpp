#include "langid/label.hpp"

#include "langid/error.hpp"

namespace langid {
namespace {

bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }

std::string_view strip_prefix(std::string_view raw) {
  if (raw.starts_with(kLabelPrefix)) raw.remove_prefix(kLabelPrefix.size());
  return raw;
}

bool matches_pattern(std::string_view s) {
  return s.size() == 8 && is_lower(s[0]) && is_lower(s[1]) && is_lower(s[2]) &&
         s[3] == '_' && is_upper(s[4]) && is_lower(s[5]) && is_lower(s[6]) &&
         is_lower(s[7]);
}

}  // namespace

bool is_valid_label(std::string_view raw) noexcept {
  return matches_pattern(strip_prefix(raw));
}

LanguageLabel parse_label(std::string_view raw) {
  const std::string_view code = strip_prefix(raw);
  if (!matches_pattern(code)) {
    throw Error(Errc::kMalformedLabel,
                "malformed language label '" + std::string(raw) +
                    "' (expected xxx_Yyyy)");
  }
  return LanguageLabel{std::string(code.substr(0, 3)),
                       std::string(code.substr(4))};
}

}  // namespace langid
