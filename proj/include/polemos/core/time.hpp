#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace polemos {

/// UTC instant at second precision.
using Timestamp = std::chrono::sys_seconds;

/// Parses an RFC 3339 date-time ("2023-10-07T12:30:00Z", "...+02:00",
/// optional fractional seconds, which are truncated). Throws ParseError.
Timestamp parse_rfc3339(std::string_view text);

std::optional<Timestamp> try_parse_rfc3339(std::string_view text) noexcept;

/// Always renders in UTC with a trailing 'Z'.
std::string format_rfc3339(Timestamp t);

/// "YYYY-MM-DD" of the UTC calendar day containing t.
std::string format_date(Timestamp t);

Timestamp make_timestamp(int year, unsigned month, unsigned day, int hour = 0,
                         int minute = 0, int second = 0);

}  // namespace polemos
