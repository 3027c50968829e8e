#include "polemos/corpus/store.hpp"

#include <mutex>

#include "polemos/core/error.hpp"
#include "polemos/core/fileio.hpp"

namespace polemos {
namespace fs = std::filesystem;

namespace {

void validate(const Comment& c) {
  if (c.comment_id.empty()) throw InvalidArgument("comment with empty comment_id");
  if (c.like_count < 0) throw InvalidArgument("comment " + c.comment_id + " has negative like_count");
}

template <class Fn>
void for_each_jsonl_line(const fs::path& path, Fn&& fn) {
  if (!fs::exists(path)) return;
  const std::string content = read_file(path);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string::npos) end = content.size();
    ++line_no;
    const std::string_view line(content.data() + pos, end - pos);
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    try {
      fn(j);
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

}  // namespace

CorpusStats corpus_stats(std::span<const Comment> comments) {
  CorpusStats s;
  for (const Comment& c : comments) {
    ++s.count;
    ++s.per_video[c.video_id];
    s.like_sum += c.like_count;
    if (!s.date_min || c.published_at < *s.date_min) s.date_min = c.published_at;
    if (!s.date_max || c.published_at > *s.date_max) s.date_max = c.published_at;
  }
  return s;
}

CorpusStore::CorpusStore(fs::path path) : path_(std::move(path)) {}

std::vector<Comment> CorpusStore::load_locked() const {
  std::vector<Comment> out;
  for_each_jsonl_line(path_, [&](const nlohmann::json& j) { out.push_back(comment_from_json(j)); });
  return out;
}

std::vector<Comment> CorpusStore::load() const {
  std::shared_lock lock(mutex_);
  return load_locked();
}

std::size_t CorpusStore::size() const {
  std::shared_lock lock(mutex_);
  if (ids_) return ids_->size();
  return load_locked().size();
}

std::size_t CorpusStore::append(std::span<const Comment> batch) {
  for (const Comment& c : batch) validate(c);

  std::unique_lock lock(mutex_);
  if (!ids_) {
    std::unordered_set<std::string> ids;
    for (const Comment& c : load_locked()) ids.insert(c.comment_id);
    ids_ = std::move(ids);
  }

  std::string buffer;
  std::vector<const std::string*> accepted;
  std::unordered_set<std::string_view> in_batch;
  for (const Comment& c : batch) {
    if (ids_->contains(c.comment_id) || !in_batch.insert(c.comment_id).second) continue;
    buffer += to_jsonl_line(c);
    accepted.push_back(&c.comment_id);
  }
  if (accepted.empty()) return 0;

  if (path_.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path_.parent_path(), ec);
  }
  append_file_atomic(path_, buffer);
  for (const std::string* id : accepted) ids_->insert(*id);
  return accepted.size();
}

void CorpusStore::replace_all(std::span<const Comment> comments) {
  std::unordered_set<std::string> ids;
  std::string buffer;
  for (const Comment& c : comments) {
    validate(c);
    if (!ids.insert(c.comment_id).second) throw InvalidArgument("duplicate comment_id " + c.comment_id);
    buffer += to_jsonl_line(c);
  }
  std::unique_lock lock(mutex_);
  write_file_atomic(path_, buffer);
  ids_ = std::move(ids);
}

std::vector<VideoRef> read_video_list(const fs::path& path) {
  std::vector<VideoRef> out;
  for_each_jsonl_line(path, [&](const nlohmann::json& j) { out.push_back(video_from_json(j)); });
  return out;
}

void write_video_list(const fs::path& path, std::span<const VideoRef> videos) {
  std::unordered_set<std::string_view> ids;
  std::string buffer;
  for (const VideoRef& v : videos) {
    if (!ids.insert(v.video_id).second) throw InvalidArgument("duplicate video_id " + v.video_id);
    buffer += to_jsonl_line(v);
  }
  write_file_atomic(path, buffer);
}

}  // namespace polemos
