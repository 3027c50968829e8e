#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "polemos/analysis/report.hpp"
#include "polemos/analysis/svg.hpp"
#include "polemos/analysis/views.hpp"
#include "polemos/core/fileio.hpp"
#include "support.hpp"

using namespace polemos;
using namespace std::chrono_literals;

namespace {

const Timestamp kAnchor = make_timestamp(2023, 10, 7);

CodedComment coded(const std::string& id, Timestamp t, int code, std::int64_t likes = 0) {
  return {id, t, likes, code};
}

}  // namespace

TEST_CASE("percent difference renders two decimals") {
  CHECK(format_percent(percent_difference(29884, 29820)) == "0.21");
  CHECK(format_percent(percent_difference(13416, 10000)) == "34.16");
  CHECK(format_percent(percent_difference(Rational::from_decimal("1.3416") * Rational(2500), 2500)) == "34.16");
  CHECK(format_percent(percent_difference(50, 100)) == "-50.00");
  CHECK(percent_difference(3, 3) == Rational(0));
  CHECK_THROWS_AS(percent_difference(1, 0), Undefined);
}

TEST_CASE("fortnight bins are half open") {
  CHECK(bin_index(kAnchor, kAnchor) == 0);
  CHECK(bin_index(kAnchor + 13 * 24h + 23h + 59min + 59s, kAnchor) == 0);
  CHECK(bin_index(kAnchor + 14 * 24h, kAnchor) == 1);
  CHECK(bin_index(kAnchor + 28 * 24h - 1s, kAnchor) == 1);
  CHECK_THROWS_AS(bin_index(kAnchor - 1s, kAnchor), OutOfWindow);
  const TimeBin b = time_bin(kAnchor, 2);
  CHECK(b.start == kAnchor + 28 * 24h);
  CHECK(b.end == kAnchor + 42 * 24h);
}

TEST_CASE("trend keeps empty bins up to the range end") {
  std::vector<CodedComment> rows{coded("a", kAnchor, 1), coded("b", kAnchor + 30 * 24h, 2)};
  const TrendSeries s = bin_by_fortnight(rows, kAnchor, make_timestamp(2024, 1, 8));
  CHECK(s.size() == 7);
  CHECK(s.bins[0][1] == 1);
  CHECK(s.bins[2][2] == 1);
  CHECK(s.bins[6] == LabelCounts{});
  CHECK(s.total() == 2);
  CHECK(bin_by_fortnight(rows, kAnchor).size() == 3);
  std::vector<CodedComment> late{coded("z", make_timestamp(2024, 1, 8), 1)};
  CHECK_THROWS_AS(bin_by_fortnight(late, kAnchor, make_timestamp(2024, 1, 8)), OutOfWindow);
  std::vector<CodedComment> bad{coded("z", kAnchor, 7)};
  CHECK_THROWS(count_by_label(std::span<const CodedComment>(bad)));
}

TEST_CASE("affinity uses exact means") {
  std::vector<CodedComment> rows{coded("a", kAnchor, 0, 1), coded("b", kAnchor, 0, 2), coded("c", kAnchor, 5, 10)};
  const AffinityReport r = affinity_by_label(rows);
  CHECK(r[0].comment_count == 2);
  CHECK(r[0].like_sum == 3);
  CHECK(*r[0].mean_likes == Rational(3, 2));
  CHECK(*r[5].mean_likes == Rational(10));
  CHECK_FALSE(r[1].mean_likes.has_value());
}

TEST_CASE("lead changes skip excluded labels") {
  TrendSeries s;
  s.anchor = kAnchor;
  s.bins = {LabelCounts{1, 0, 0, 50, 50, 0, 9}, LabelCounts{2, 0, 0, 90, 0, 0, 8}, LabelCounts{7, 0, 0, 0, 0, 0, 3},
            LabelCounts{7, 0, 0, 0, 0, 7, 3}};
  const auto ev = detect_lead_changes(s);
  REQUIRE(ev.size() == 1);
  CHECK(ev[0] == LeadChangeEvent{2, 6, 0, 4});
  // Ties go to the lowest code, so bin 3 keeps code 0.
  CHECK(bin_leader(s.bins[3], default_lead_exclusions()) == 0);
  // Without exclusions SIN_POSTURA leads the first bins.
  const auto all = detect_lead_changes(s, {});
  REQUIRE(all.size() == 1);
  CHECK(all[0].previous_leader == 3);
  CHECK(all[0].new_leader == 0);
  CHECK(all[0].margin == 7);
  std::set<int> everything{0, 1, 2, 3, 4, 5, 6};
  CHECK_FALSE(bin_leader(s.bins[0], everything).has_value());
}

TEST_CASE("analysis matches the brute-force oracle") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto f = oracle::random_fixture(seed, 200 * seed);
    CHECK_MESSAGE(oracle::compare_all(f.rows, f.predicted, f.anchor, f.end).empty(), "seed " << seed);
  }
}

TEST_CASE("svg output escapes text and is stable") {
  CHECK(svg::escape_xml("a<b & \"c\"") == "a&lt;b &amp; &quot;c&quot;");
  svg::BarChart chart{"Título <x>", "n", {"A", "B"}, {1, 3}, {"1", "3"}};
  const std::string a = svg::render(chart);
  CHECK(a.rfind("<svg", 0) == 0);
  CHECK(a.find("Título &lt;x&gt;") != std::string::npos);
  CHECK(a == svg::render(chart));
  svg::LineChart line{"t", "n", {"b0", "b1"}, {{"s", {1, 2}}}};
  CHECK(svg::render(line).find("polyline") != std::string::npos);
}

TEST_CASE("report bundle") {
  testing::TempDir dir("report");
  std::vector<Comment> corpus;
  std::vector<PredictionRow> preds;
  const int codes[] = {6, 6, 6, 0, 1, 3, 0, 0, 0, 0};
  for (int i = 0; i < 10; ++i) {
    const Timestamp t = i < 5 ? kAnchor + 24h * i : make_timestamp(2024, 1, 2) + 1h * i;
    corpus.push_back(testing::make_comment("c" + std::to_string(i), "texto", t, i));
    preds.push_back({"c" + std::to_string(i), codes[i], 0.9});
  }
  ReportOptions opts;
  opts.training_counts = LabelCounts{5, 5, 5, 5, 5, 5, 5};
  const ReportBundle b = build_report(corpus, preds, opts, dir.path());

  const std::vector<std::filesystem::path> expected{
      "affinity.csv", "charts/affinity.svg", "charts/counts.svg", "charts/trend.svg", "charts/trend_january.svg",
      "counts.csv",   "lead_changes.json",   "summary.json",      "summary.txt",      "trend.csv"};
  CHECK(b.files == expected);
  for (const auto& f : expected) CHECK(std::filesystem::exists(dir.path() / f));

  CHECK(b.counts == LabelCounts{5, 1, 0, 1, 0, 0, 3});
  const auto counts_csv = read_file(dir.path() / "counts.csv");
  CHECK(counts_csv.find("0,ANTI_HAMAS,5,50.00\n") != std::string::npos);
  CHECK(counts_csv.find("2,ANTI_PALESTINO,0,0.00\n") != std::string::npos);

  const auto summary = nlohmann::json::parse(read_file(dir.path() / "summary.json"));
  CHECK(summary.at("total_comments") == 10);
  CHECK(summary.at("bins") == 7);
  CHECK(summary.at("leading_pair").at("leader") == 0);
  CHECK(summary.at("leading_pair").at("runner_up") == 6);
  CHECK(summary.at("leading_pair").at("percent_difference") == "66.67");
  CHECK(summary.at("class_collapse") == std::vector<int>{2, 4, 5});
  CHECK(summary.at("labels")[0].at("mean_likes") == "6.60");
  CHECK(summary.at("labels")[2].at("mean_likes").is_null());

  // Code 6 leads bin 0; bins 1..5 are empty, so code 0 leads from bin 1 by the tie rule.
  REQUIRE(b.lead_changes.size() == 1);
  CHECK(b.lead_changes[0] == LeadChangeEvent{1, 6, 0, 0});

  const auto trend = read_file(dir.path() / "trend.csv");
  CHECK(trend.rfind("bin_index,bin_start,label_code,count\n0,2023-10-07T00:00:00Z,0,1\n", 0) == 0);

  // Deterministic bytes.
  testing::TempDir again("report2");
  build_report(corpus, preds, opts, again.path());
  for (const auto& f : expected) CHECK(read_file(dir.path() / f) == read_file(again.path() / f));
}

TEST_CASE("report requires a prediction for every comment") {
  testing::TempDir dir("coverage");
  std::vector<Comment> corpus{testing::make_comment("a", "x y", kAnchor), testing::make_comment("b", "x y", kAnchor)};
  std::vector<PredictionRow> preds{{"a", 1, 0.5}};
  try {
    build_report(corpus, preds, ReportOptions{}, dir.path());
    FAIL("expected CoverageError");
  } catch (const CoverageError& e) {
    CHECK(e.missing() == std::vector<std::string>{"b"});
  }
}
