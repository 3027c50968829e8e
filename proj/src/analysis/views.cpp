#include "polemos/analysis/views.hpp"

#include <algorithm>

namespace polemos {
namespace {

void check_code(int code) {
  if (!is_valid_code(code)) throw InvalidArgument("label code " + std::to_string(code) + " is outside 0..6");
}

// Floor division for a possibly negative numerator.
std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

TimeBin time_bin(Timestamp anchor, std::int64_t index) {
  const Timestamp start = anchor + kFortnight * index;
  return {index, start, start + kFortnight};
}

std::int64_t bin_index(Timestamp t, Timestamp anchor) {
  if (t < anchor)
    throw OutOfWindow("timestamp " + format_rfc3339(t) + " precedes the bin anchor " + format_rfc3339(anchor));
  const std::int64_t span = std::chrono::duration_cast<std::chrono::seconds>(kFortnight).count();
  return floor_div((t - anchor).count(), span);
}

std::int64_t TrendSeries::total() const {
  std::int64_t n = 0;
  for (const LabelCounts& b : bins)
    for (const std::int64_t c : b) n += c;
  return n;
}

TrendSeries bin_by_fortnight(std::span<const CodedComment> comments, Timestamp anchor, std::optional<Timestamp> end) {
  TrendSeries series;
  series.anchor = anchor;
  std::int64_t last = -1;
  if (end) {
    if (*end <= anchor) throw InvalidArgument("bin range end must be after the anchor");
    last = bin_index(*end - std::chrono::seconds(1), anchor);
  }
  std::vector<std::int64_t> idx;
  idx.reserve(comments.size());
  for (const CodedComment& c : comments) {
    check_code(c.code);
    if (end && c.published_at >= *end)
      throw OutOfWindow("comment " + c.comment_id + " at " + format_rfc3339(c.published_at) + " is past the range end");
    const std::int64_t i = bin_index(c.published_at, anchor);
    idx.push_back(i);
    if (!end) last = std::max(last, i);
  }
  series.bins.assign(static_cast<std::size_t>(last + 1), LabelCounts{});
  for (std::size_t k = 0; k < comments.size(); ++k)
    ++series.bins[static_cast<std::size_t>(idx[k])][static_cast<std::size_t>(comments[k].code)];
  return series;
}

LabelCounts count_by_label(std::span<const int> codes) {
  LabelCounts counts{};
  for (const int c : codes) {
    check_code(c);
    ++counts[static_cast<std::size_t>(c)];
  }
  return counts;
}

LabelCounts count_by_label(std::span<const CodedComment> comments) {
  LabelCounts counts{};
  for (const CodedComment& c : comments) {
    check_code(c.code);
    ++counts[static_cast<std::size_t>(c.code)];
  }
  return counts;
}

Rational percent_difference(const Rational& a, const Rational& b) {
  if (b == Rational(0)) throw Undefined("percent difference against a zero base is undefined");
  return (a - b) / b * Rational(100);
}

std::string format_percent(const Rational& p) { return p.to_fixed(2); }

AffinityReport affinity_by_label(std::span<const CodedComment> comments) {
  AffinityReport report{};
  for (const CodedComment& c : comments) {
    check_code(c.code);
    if (c.like_count < 0) throw InvalidArgument("comment " + c.comment_id + " has a negative like count");
    auto& a = report[static_cast<std::size_t>(c.code)];
    ++a.comment_count;
    a.like_sum += c.like_count;
  }
  for (LabelAffinity& a : report)
    if (a.comment_count > 0) a.mean_likes = Rational(a.like_sum, a.comment_count);
  return report;
}

std::optional<int> bin_leader(const LabelCounts& counts, const std::set<int>& exclude) {
  std::optional<int> leader;
  for (int c = 0; c < kNumLabels; ++c) {
    if (exclude.contains(c)) continue;
    if (!leader || counts[static_cast<std::size_t>(c)] > counts[static_cast<std::size_t>(*leader)]) leader = c;
  }
  return leader;
}

std::vector<LeadChangeEvent> detect_lead_changes(const TrendSeries& series, const std::set<int>& exclude) {
  std::vector<LeadChangeEvent> events;
  for (std::size_t i = 1; i < series.bins.size(); ++i) {
    const auto prev = bin_leader(series.bins[i - 1], exclude);
    const auto next = bin_leader(series.bins[i], exclude);
    if (!prev || !next || *prev == *next) continue;
    const LabelCounts& b = series.bins[i];
    events.push_back({static_cast<std::int64_t>(i), *prev, *next,
                      b[static_cast<std::size_t>(*next)] - b[static_cast<std::size_t>(*prev)]});
  }
  return events;
}

}  // namespace polemos
