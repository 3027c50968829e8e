#include "doctest.h"
#include "polemos/core/csv.hpp"
#include "polemos/core/error.hpp"
#include "polemos/core/fileio.hpp"
#include "polemos/core/rational.hpp"
#include "polemos/core/rng.hpp"
#include "polemos/core/time.hpp"
#include "polemos/core/url.hpp"
#include "support.hpp"

using namespace polemos;

TEST_CASE("csv round trip with quotes, commas and newlines") {
  const std::vector<std::string> fields{"plain", "with,comma", "say \"hola\"", "line\nbreak", ""};
  const std::string line = csv::row(fields);
  const auto parsed = csv::parse(line);
  REQUIRE(parsed.size() == 1);
  CHECK(parsed[0] == fields);
  CHECK(csv::escape("a,b") == "\"a,b\"");
  CHECK(csv::escape("abc") == "abc");
}

TEST_CASE("csv rejects an unterminated quote") {
  CHECK_THROWS_AS(csv::parse("a,\"open\n"), ParseError);
}

TEST_CASE("csv parses CRLF documents") {
  const auto rows = csv::parse("a,b\r\n1,2\r\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[1] == std::vector<std::string>{"1", "2"});
}

TEST_CASE("rational arithmetic stays exact") {
  const Rational third(1, 3);
  CHECK(third + third + third == Rational(1));
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(-3, -6) == Rational(1, 2));
  CHECK(Rational(1, -2).num() == -1);
  CHECK(Rational(1, 2) < Rational(2, 3));
  CHECK((Rational(7, 3) - Rational(1, 3)) * Rational(1, 2) == Rational(1));
  CHECK_THROWS_AS(Rational(1, 0), InvalidArgument);
  CHECK_THROWS_AS(Rational(1) / Rational(0), InvalidArgument);
}

TEST_CASE("rational fixed-point rendering rounds half away from zero") {
  CHECK(Rational(1, 8).to_fixed(2) == "0.13");
  CHECK(Rational(-1, 8).to_fixed(2) == "-0.13");
  CHECK(Rational(1, 3).to_fixed(2) == "0.33");
  CHECK(Rational(2, 3).to_fixed(0) == "1");
  CHECK(Rational(5).to_fixed(3) == "5.000");
  CHECK(Rational(-1, 1000).to_fixed(2) == "0.00");
}

TEST_CASE("rational parses decimals") {
  CHECK(Rational::from_decimal("0.9") == Rational(9, 10));
  CHECK(Rational::from_decimal("1.3416") == Rational(13416, 10000));
  CHECK(Rational::from_decimal("-2.5") == Rational(-5, 2));
  CHECK_THROWS_AS(Rational::from_decimal(""), ParseError);
  CHECK_THROWS_AS(Rational::from_decimal("1.2.3"), ParseError);
  CHECK_THROWS_AS(Rational::from_decimal("abc"), ParseError);
}

TEST_CASE("rfc3339 parse and format") {
  const Timestamp t = parse_rfc3339("2023-10-07T06:30:00Z");
  CHECK(t == make_timestamp(2023, 10, 7, 6, 30));
  CHECK(format_rfc3339(t) == "2023-10-07T06:30:00Z");
  CHECK(format_date(t) == "2023-10-07");
  CHECK(parse_rfc3339("2023-10-07T08:30:00+02:00") == t);
  CHECK(parse_rfc3339("2023-10-07T06:30:00.123Z") == t);
  CHECK_FALSE(try_parse_rfc3339("2023-13-40T00:00:00Z").has_value());
  CHECK_FALSE(try_parse_rfc3339("yesterday").has_value());
  CHECK_THROWS_AS(parse_rfc3339("2023-10-07"), ParseError);
}

TEST_CASE("rng is reproducible and bounded") {
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng r(1);
  for (int i = 0; i < 1000; ++i) {
    CHECK(r.below(7) < 7);
    const double u = r.unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  std::vector<int> v{1, 2, 3, 4, 5, 6};
  Rng s(9);
  s.shuffle(v);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{1, 2, 3, 4, 5, 6});
}

TEST_CASE("atomic write and append") {
  testing::TempDir dir("io");
  const auto p = dir / "sub/file.txt";
  write_file_atomic(p, "one\n");
  append_file_atomic(p, "two\n");
  CHECK(read_file(p) == "one\ntwo\n");
  write_file_atomic(p, "fresh");
  CHECK(read_file(p) == "fresh");
  CHECK_THROWS_AS(read_file(dir / "missing"), StorageError);
}

TEST_CASE("url split and percent encoding") {
  const Url u = parse_url("https://www.googleapis.com/youtube/v3");
  CHECK(u.origin == "https://www.googleapis.com");
  CHECK(u.path == "/youtube/v3");
  CHECK(parse_url("http://127.0.0.1:8080").path.empty());
  CHECK(percent_encode("israel palestina") == "israel%20palestina");
  CHECK(percent_encode("a-b_c.d~") == "a-b_c.d~");
  CHECK(percent_encode("ñ") == "%C3%B1");
}
