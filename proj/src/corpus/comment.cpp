#include "polemos/corpus/comment.hpp"

#include "json.hpp"

#include "polemos/core/error.hpp"

namespace polemos {
using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'");
  return *it;
}

std::string string_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) throw ParseError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

Timestamp time_field(const json& j, const char* key) { return parse_rfc3339(string_field(j, key)); }

}  // namespace

StudyWindow::StudyWindow(Timestamp s, Timestamp e) : start(s), end(e) {
  if (!(s < e)) throw InvalidArgument("study window requires start < end");
}

StudyWindow StudyWindow::conflict_default() {
  return StudyWindow(make_timestamp(2023, 10, 7), make_timestamp(2024, 1, 8));
}

json to_json(const Comment& c) {
  return json(ordered_json{{"comment_id", c.comment_id},
                           {"author", c.author},
                           {"published_at", format_rfc3339(c.published_at)},
                           {"like_count", c.like_count},
                           {"text", c.text},
                           {"video_id", c.video_id},
                           {"is_public", c.is_public}});
}

std::string to_jsonl_line(const Comment& c) {
  ordered_json j{{"comment_id", c.comment_id},
                 {"author", c.author},
                 {"published_at", format_rfc3339(c.published_at)},
                 {"like_count", c.like_count},
                 {"text", c.text},
                 {"video_id", c.video_id},
                 {"is_public", c.is_public}};
  return j.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
}

Comment comment_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("comment record must be a JSON object");
  Comment c;
  c.comment_id = string_field(j, "comment_id");
  if (c.comment_id.empty()) throw ParseError("empty comment_id");
  c.author = string_field(j, "author");
  c.published_at = time_field(j, "published_at");
  const json& likes = field(j, "like_count");
  if (!likes.is_number_integer()) throw ParseError("like_count must be an integer");
  c.like_count = likes.get<std::int64_t>();
  if (c.like_count < 0) throw ParseError("like_count must be non-negative");
  c.text = string_field(j, "text");
  c.video_id = string_field(j, "video_id");
  const json& pub = field(j, "is_public");
  if (!pub.is_boolean()) throw ParseError("is_public must be a boolean");
  c.is_public = pub.get<bool>();
  return c;
}

json to_json(const VideoRef& v) {
  return json(ordered_json{{"video_id", v.video_id},
                           {"title", v.title},
                           {"channel", v.channel},
                           {"matched_query", v.matched_query},
                           {"published_at", format_rfc3339(v.published_at)}});
}

std::string to_jsonl_line(const VideoRef& v) {
  ordered_json j{{"video_id", v.video_id},
                 {"title", v.title},
                 {"channel", v.channel},
                 {"matched_query", v.matched_query},
                 {"published_at", format_rfc3339(v.published_at)}};
  return j.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
}

VideoRef video_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("video record must be a JSON object");
  VideoRef v;
  v.video_id = string_field(j, "video_id");
  v.title = string_field(j, "title");
  v.channel = string_field(j, "channel");
  v.matched_query = string_field(j, "matched_query");
  v.published_at = time_field(j, "published_at");
  return v;
}

}  // namespace polemos
