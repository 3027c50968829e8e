#pragma once

#include <cstddef>
#include <string_view>

namespace polemos::text {

/// Strips leading/trailing Unicode whitespace (White_Space property).
std::string_view trim(std::string_view utf8);

/// True for Extended_Pictographic code points.
bool is_pictographic(char32_t cp);

/// Emoji presentation glue: variation selectors, ZWJ, skin-tone modifiers,
/// regional indicators and tag characters.
bool is_emoji_component(char32_t cp);

/// Counts Alphabetic code points after dropping pictographic code points,
/// variation selectors and ZWJ. Invalid UTF-8 bytes count as non-alphabetic.
std::size_t count_alphabetic(std::string_view utf8);

/// The non-referential rule: a comment refers to something only when it
/// keeps at least two alphabetic code points once emoji are removed.
inline bool is_referential(std::string_view utf8) { return count_alphabetic(utf8) >= 2; }

}  // namespace polemos::text
