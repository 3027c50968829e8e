#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace polemos::csv {

/// Quotes a field when it contains a comma, quote, CR or LF (RFC 4180).
std::string escape(std::string_view field);

/// Joins escaped fields with commas and appends "\n".
std::string row(const std::vector<std::string>& fields);

/// Parses a whole RFC 4180 document. Quoted fields may span lines.
/// Throws ParseError on an unterminated quote.
std::vector<std::vector<std::string>> parse(std::string_view document);

}  // namespace polemos::csv
