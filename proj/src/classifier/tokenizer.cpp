#include "polemos/classifier/tokenizer.hpp"

#include <unicode/brkiter.h>
#include <unicode/locid.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <memory>

#include "polemos/core/error.hpp"
#include "polemos/corpus/text.hpp"

namespace polemos {
namespace {

std::unique_ptr<icu::BreakIterator> make_word_iterator() {
  UErrorCode status = U_ZERO_ERROR;
  std::unique_ptr<icu::BreakIterator> it(icu::BreakIterator::createWordInstance(icu::Locale::getRoot(), status));
  if (U_FAILURE(status) || !it) throw Error(std::string("ICU word iterator: ") + u_errorName(status));
  return it;
}

icu::BreakIterator& word_iterator() {
  thread_local std::unique_ptr<icu::BreakIterator> it = make_word_iterator();
  return *it;
}

enum class SegmentKind { kDropped, kWord, kEmoji };

SegmentKind classify(const icu::UnicodeString& s, int32_t start, int32_t end) {
  bool emoji = false;
  for (int32_t i = start; i < end;) {
    const UChar32 cp = s.char32At(i);
    i += U16_LENGTH(cp);
    if (u_hasBinaryProperty(cp, UCHAR_ALPHABETIC) || u_isdigit(cp)) return SegmentKind::kWord;
    if (text::is_pictographic(static_cast<char32_t>(cp)) ||
        u_hasBinaryProperty(cp, UCHAR_REGIONAL_INDICATOR))
      emoji = true;
  }
  return emoji ? SegmentKind::kEmoji : SegmentKind::kDropped;
}

}  // namespace

TokenSequence tokenize(std::string_view text) {
  TokenSequence tokens;
  if (text.empty()) return tokens;
  const icu::UnicodeString us =
      icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::BreakIterator& it = word_iterator();
  it.setText(us);
  int32_t start = it.first();
  for (int32_t end = it.next(); end != icu::BreakIterator::DONE; start = end, end = it.next()) {
    const SegmentKind kind = classify(us, start, end);
    if (kind == SegmentKind::kDropped) continue;
    icu::UnicodeString piece(us, start, end - start);
    if (kind == SegmentKind::kWord) piece.toLower(icu::Locale::getRoot());
    std::string utf8;
    piece.toUTF8String(utf8);
    if (!utf8.empty()) tokens.push_back(std::move(utf8));
  }
  return tokens;
}

}  // namespace polemos
