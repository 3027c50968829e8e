#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"

#include "polemos/core/time.hpp"

namespace polemos {

/// One platform comment with the six captured columns plus its id.
struct Comment {
  std::string comment_id;
  std::string author;
  Timestamp published_at{};
  std::int64_t like_count = 0;
  std::string text;
  std::string video_id;
  bool is_public = true;

  friend bool operator==(const Comment&, const Comment&) = default;
};

struct VideoRef {
  std::string video_id;
  std::string title;
  std::string channel;
  std::string matched_query;
  Timestamp published_at{};

  friend bool operator==(const VideoRef&, const VideoRef&) = default;
};

/// Half-open interval [start, end).
struct StudyWindow {
  Timestamp start{};
  Timestamp end{};

  StudyWindow() = default;
  /// Throws InvalidArgument unless start < end.
  StudyWindow(Timestamp start, Timestamp end);

  bool contains(Timestamp t) const { return start <= t && t < end; }

  /// 2023-10-07T00:00:00Z .. 2024-01-08T00:00:00Z (exclusive).
  static StudyWindow conflict_default();
};

nlohmann::json to_json(const Comment& c);
/// Validates field presence and types, like_count >= 0, timestamp format.
/// Throws ParseError.
Comment comment_from_json(const nlohmann::json& j);

nlohmann::json to_json(const VideoRef& v);
VideoRef video_from_json(const nlohmann::json& j);

/// One compact JSON object per line, keys in a fixed order.
std::string to_jsonl_line(const Comment& c);
std::string to_jsonl_line(const VideoRef& v);

}  // namespace polemos
