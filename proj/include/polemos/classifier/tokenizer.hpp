#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace polemos {

/// Ordered, never containing an empty token.
using TokenSequence = std::vector<std::string>;

/// Segmentation rule:
///  - the text is split at Unicode (UAX #29) word boundaries;
///  - a segment holding any letter or digit becomes one token, lowercased
///    with root-locale rules ("Gaza" -> "gaza", "ISRAEL's" -> "israel's");
///  - a segment made of emoji becomes one token as written. A segment is one
///    pictographic code point together with its modifiers, variation
///    selectors and ZWJ continuations, or one regional-indicator pair (a
///    flag such as 🇵🇸);
///  - everything else (spaces, punctuation, symbols) is dropped.
TokenSequence tokenize(std::string_view text);

}  // namespace polemos
