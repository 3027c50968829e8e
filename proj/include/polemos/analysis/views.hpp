#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "polemos/annotation/schema.hpp"
#include "polemos/core/error.hpp"
#include "polemos/core/rational.hpp"
#include "polemos/core/time.hpp"

namespace polemos {

class OutOfWindow : public Error {
 public:
  using Error::Error;
};

/// percent_difference with a zero base.
class Undefined : public Error {
 public:
  using Error::Error;
};

struct CodedComment {
  std::string comment_id;
  Timestamp published_at{};
  std::int64_t like_count = 0;
  int code = 0;
};

inline constexpr std::chrono::days kFortnight{14};

struct TimeBin {
  std::int64_t index = 0;
  Timestamp start{};
  Timestamp end{};  // exclusive
};

TimeBin time_bin(Timestamp anchor, std::int64_t index);

/// floor((t - anchor) / 14 days). Throws OutOfWindow when t < anchor.
std::int64_t bin_index(Timestamp t, Timestamp anchor);

struct TrendSeries {
  Timestamp anchor{};
  std::vector<LabelCounts> bins;  // bins[i][code]

  std::size_t size() const { return bins.size(); }
  TimeBin bin(std::size_t i) const { return time_bin(anchor, static_cast<std::int64_t>(i)); }
  std::int64_t total() const;
};

/// Half-open fortnight bins from the anchor. Bins run contiguously from 0 to
/// the last occupied bin, or to the bin containing `end - 1s` when `end` is
/// given, so empty bins appear with zero counts. Throws OutOfWindow for any
/// comment before the anchor (or at/after `end`), InvalidArgument for a
/// code outside 0..6.
TrendSeries bin_by_fortnight(std::span<const CodedComment> comments, Timestamp anchor,
                             std::optional<Timestamp> end = std::nullopt);

/// Throws InvalidArgument for a code outside 0..6.
LabelCounts count_by_label(std::span<const int> codes);
LabelCounts count_by_label(std::span<const CodedComment> comments);

/// (a - b) / b * 100, exact. Throws Undefined when b == 0.
Rational percent_difference(const Rational& a, const Rational& b);
/// Two-decimal rendering, e.g. "0.21".
std::string format_percent(const Rational& p);

struct LabelAffinity {
  std::int64_t comment_count = 0;
  std::int64_t like_sum = 0;
  std::optional<Rational> mean_likes;  // absent when comment_count == 0
};

using AffinityReport = std::array<LabelAffinity, kNumLabels>;

/// Throws InvalidArgument on a negative like count or a bad code.
AffinityReport affinity_by_label(std::span<const CodedComment> comments);

struct LeadChangeEvent {
  std::int64_t bin_index = 0;  // the bin where the new leader takes over
  int previous_leader = 0;
  int new_leader = 0;
  std::int64_t margin = 0;  // new leader's count minus previous leader's, in that bin

  friend bool operator==(const LeadChangeEvent&, const LeadChangeEvent&) = default;
};

inline const std::set<int>& default_lead_exclusions() {
  static const std::set<int> kExcluded{static_cast<int>(Stance::kSinPostura), static_cast<int>(Stance::kNoRelacionado)};
  return kExcluded;
}

/// Leader of a bin: argmax over non-excluded labels, ties to the lowest
/// code. Returns nullopt when every label is excluded.
std::optional<int> bin_leader(const LabelCounts& counts, const std::set<int>& exclude);

std::vector<LeadChangeEvent> detect_lead_changes(const TrendSeries& series,
                                                 const std::set<int>& exclude = default_lead_exclusions());

}  // namespace polemos
