#include "polemos/corpus/text.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

namespace polemos::text {
namespace {

constexpr char32_t kZwj = 0x200D;

bool is_variation_selector(char32_t cp) {
  return (cp >= 0xFE00 && cp <= 0xFE0F) || (cp >= 0xE0100 && cp <= 0xE01EF);
}

template <class Fn>
void for_each_code_point(std::string_view s, Fn&& fn) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(s.data());
  const auto length = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 cp = 0;
    U8_NEXT(bytes, i, length, cp);
    fn(cp);
  }
}

}  // namespace

bool is_pictographic(char32_t cp) {
  return u_hasBinaryProperty(static_cast<UChar32>(cp), UCHAR_EXTENDED_PICTOGRAPHIC);
}

bool is_emoji_component(char32_t cp) {
  const auto c = static_cast<UChar32>(cp);
  return cp == kZwj || is_variation_selector(cp) || u_hasBinaryProperty(c, UCHAR_EMOJI_MODIFIER) ||
         u_hasBinaryProperty(c, UCHAR_REGIONAL_INDICATOR) || (cp >= 0xE0020 && cp <= 0xE007F);
}

std::string_view trim(std::string_view s) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(s.data());
  const auto length = static_cast<int32_t>(s.size());
  int32_t begin = 0;
  while (begin < length) {
    int32_t next = begin;
    UChar32 cp = 0;
    U8_NEXT(bytes, next, length, cp);
    if (cp < 0 || !u_isUWhiteSpace(cp)) break;
    begin = next;
  }
  int32_t end = length;
  while (end > begin) {
    int32_t prev = end;
    UChar32 cp = 0;
    U8_PREV(bytes, 0, prev, cp);
    if (cp < 0 || !u_isUWhiteSpace(cp)) break;
    end = prev;
  }
  return s.substr(static_cast<std::size_t>(begin), static_cast<std::size_t>(end - begin));
}

std::size_t count_alphabetic(std::string_view s) {
  std::size_t n = 0;
  for_each_code_point(s, [&](UChar32 cp) {
    if (cp < 0) return;
    const auto c = static_cast<char32_t>(cp);
    if (c == kZwj || is_variation_selector(c) || is_pictographic(c)) return;
    if (u_hasBinaryProperty(cp, UCHAR_ALPHABETIC)) ++n;
  });
  return n;
}

}  // namespace polemos::text
