#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "polemos/corpus/comment.hpp"

namespace polemos::fixtures {

/// One canned answer. A request matches when the endpoint is equal, every
/// listed param has the same value, and pageToken agrees exactly (absent on
/// both sides, or equal). Among matches the entry listing the most params
/// wins, then the earliest. The first `fail_first` matching requests get a
/// 503 instead.
struct CannedResponse {
  std::string endpoint;
  std::map<std::string, std::string> params;
  int status = 200;
  std::string body;
  int fail_first = 0;
};

struct RecordedRequest {
  std::string endpoint;
  std::map<std::string, std::string> params;
  int status = 0;
};

/// Local HTTP stand-in for the platform's search/commentThreads API, served
/// under "/youtube/v3". Unmatched requests get 404.
class MockPlatform {
 public:
  // port 0 binds any free port.
  explicit MockPlatform(std::vector<CannedResponse> responses, int port = 0);
  ~MockPlatform();
  MockPlatform(const MockPlatform&) = delete;
  MockPlatform& operator=(const MockPlatform&) = delete;

  /// Loads every *.json file of a fixture directory in name order. Each
  /// file holds one object {endpoint, params, status, body, fail_first?};
  /// body may be a JSON value or a string.
  static std::vector<CannedResponse> load_directory(const std::filesystem::path& dir);
  static void write_directory(const std::filesystem::path& dir, std::span<const CannedResponse> responses);

  /// Returns the bound port.
  int start();
  void stop();
  std::string base_url() const;

  std::vector<RecordedRequest> requests() const;
  std::size_t request_count(const std::string& endpoint) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Shape of a synthetic platform: videos found by one search, each with its
/// comments split into pages.
struct PlatformVideo {
  VideoRef video;
  bool comments_disabled = false;
  std::vector<Comment> comments;
};

struct PlatformFixtureOptions {
  std::string query_term = "israel palestina";
  int search_page_size = 50;
  int thread_page_size = 100;
};

/// Canned responses for a search returning `videos` (paged by
/// search_page_size) and their comment threads (paged by thread_page_size).
std::vector<CannedResponse> platform_responses(std::span<const PlatformVideo> videos,
                                               const PlatformFixtureOptions& options);

std::string thread_item_json(const Comment& c);

}  // namespace polemos::fixtures
