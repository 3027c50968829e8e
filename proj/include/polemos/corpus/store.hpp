#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "polemos/corpus/comment.hpp"

namespace polemos {

struct CorpusStats {
  std::size_t count = 0;
  std::map<std::string, std::size_t> per_video;
  std::optional<Timestamp> date_min;
  std::optional<Timestamp> date_max;
  std::int64_t like_sum = 0;
};

CorpusStats corpus_stats(std::span<const Comment> comments);

/// Newline-delimited JSON corpus file.
///
/// One writer, many readers: appends and rewrites take an exclusive lock,
/// loads a shared one. A batch is either appended whole or not at all.
class CorpusStore {
 public:
  explicit CorpusStore(std::filesystem::path path);

  const std::filesystem::path& path() const { return path_; }

  /// Persists comments whose comment_id is new, in arrival order; returns
  /// how many were accepted. Throws InvalidArgument for a malformed comment
  /// and StorageError for I/O failure, appending nothing in either case.
  std::size_t append(std::span<const Comment> batch);

  /// Atomically replaces the whole dataset. Ids must be unique.
  void replace_all(std::span<const Comment> comments);

  std::vector<Comment> load() const;
  std::size_t size() const;
  CorpusStats stats() const { return corpus_stats(load()); }

 private:
  std::vector<Comment> load_locked() const;

  std::filesystem::path path_;
  mutable std::shared_mutex mutex_;
  mutable std::optional<std::unordered_set<std::string>> ids_;
};

std::vector<VideoRef> read_video_list(const std::filesystem::path& path);
void write_video_list(const std::filesystem::path& path, std::span<const VideoRef> videos);

}  // namespace polemos
