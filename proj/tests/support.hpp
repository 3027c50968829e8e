#pragma once

#include <unistd.h>

#include <atomic>
#include <functional>
#include <filesystem>
#include <random>
#include <string>

#include "polemos/core/time.hpp"
#include "polemos/corpus/comment.hpp"

namespace polemos::testing {

// Scratch directory removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t") {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("polemos-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Settable clock for lease and stage timestamps.
struct ManualClock {
  Timestamp now = make_timestamp(2024, 2, 1, 12);
  std::function<Timestamp()> fn() {
    return [this] { return now; };
  }
};

inline Comment make_comment(std::string id, std::string text, Timestamp at, std::int64_t likes = 0,
                            std::string video = "v1", std::string author = "a") {
  Comment c;
  c.comment_id = std::move(id);
  c.text = std::move(text);
  c.published_at = at;
  c.like_count = likes;
  c.video_id = std::move(video);
  c.author = std::move(author);
  return c;
}

}  // namespace polemos::testing
