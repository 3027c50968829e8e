#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "polemos/corpus/comment.hpp"
#include "polemos/ingest/transport.hpp"

namespace polemos {

class CorpusStore;

struct SearchQuery {
  std::string term;
  Timestamp published_after{};
  Timestamp published_before{};
  int max_videos = 50;

  /// Throws InvalidArgument on an empty term, an empty range or
  /// max_videos <= 0.
  void validate() const;
};

/// Platform API quota. Defaults follow the platform's published unit costs.
struct QuotaBudget {
  std::int64_t units_total = 10000;
  std::int64_t units_spent = 0;
  std::int64_t cost_per_search = 100;
  std::int64_t cost_per_thread_page = 1;

  std::int64_t remaining() const { return units_total - units_spent; }
};

/// Serializes debits against a QuotaBudget across fetch workers.
class QuotaLedger {
 public:
  explicit QuotaLedger(QuotaBudget budget);

  /// Debits `cost` and returns true, or returns false and debits nothing.
  bool try_debit(std::int64_t cost);
  QuotaBudget snapshot() const;

 private:
  mutable std::mutex mutex_;
  QuotaBudget budget_;
};

enum class IngestErrorKind {
  kCommentsDisabled,
  kQuotaExceeded,
  kTransientFailure,
  kHttpError,
  kMalformedItem,
  kMalformedResponse,
};

std::string_view to_string(IngestErrorKind kind);

struct IngestError {
  std::string video_id;  // empty for search-level errors
  IngestErrorKind kind;
  std::string detail;
};

enum class Outcome {
  kComplete,
  kQuotaExceeded,
  kCommentsDisabled,
  kTransientFailure,
  kFailed,
};

struct SearchResult {
  std::vector<VideoRef> videos;
  int pages = 0;  // debited search requests
  Outcome outcome = Outcome::kComplete;
  std::vector<IngestError> errors;
};

struct FetchResult {
  std::string video_id;
  int pages = 0;  // debited commentThreads requests
  std::size_t comments = 0;
  Outcome outcome = Outcome::kComplete;
  std::vector<IngestError> errors;
};

struct ClientOptions {
  std::string api_key;
  int max_retries = 3;
  /// Retry k (0-based) waits backoff_base * 2^k.
  std::chrono::milliseconds backoff_base{1000};
  int search_page_size = 50;
  int thread_page_size = 100;
  bool include_replies = false;
};

/// Client for the platform's search and commentThreads endpoints.
///
/// Every request is paid for before it is sent; a request the ledger cannot
/// cover is never issued. Retries of the same page are not charged again.
/// Transport errors and 5xx responses are retried; other 4xx responses end
/// the current query or video.
class PlatformClient {
 public:
  PlatformClient(HttpTransport& transport, ClientOptions options);

  const ClientOptions& options() const { return options_; }

  SearchResult search_videos(const SearchQuery& query, QuotaLedger& ledger);

  /// Streams top-level comments (and inline replies when enabled) to `sink`
  /// in API page order. A malformed item is skipped and recorded.
  FetchResult fetch_comment_threads(const std::string& video_id, QuotaLedger& ledger,
                                    const std::function<void(Comment&&)>& sink);

 private:
  struct Attempt {
    std::optional<HttpResponse> response;
    std::string transport_error;
  };
  Attempt get_with_retry(std::string_view endpoint, const QueryParams& params);

  HttpTransport& transport_;
  ClientOptions options_;
};

struct IngestReport {
  std::size_t videos_found = 0;
  std::size_t videos_with_comments_disabled = 0;
  std::size_t comments_fetched = 0;
  std::size_t pages_fetched = 0;  // commentThreads requests
  std::size_t search_pages = 0;
  std::int64_t quota_spent = 0;
  std::vector<IngestError> errors;
};

nlohmann::json to_json(const IngestReport& r);

struct IngestPlan {
  /// When set, only these video ids are fetched.
  std::optional<std::set<std::string>> allowlist;
  /// When set, the deduplicated video list is written here.
  std::optional<std::filesystem::path> video_list_path;
  int concurrency = 4;
};

/// Searches every query, deduplicates videos across queries (first match
/// wins), fetches all comment threads with up to plan.concurrency workers
/// and appends to the store in video order. Per-video problems are recorded
/// in the report; only a storage failure throws.
IngestReport ingest(std::span<const SearchQuery> queries, PlatformClient& client, CorpusStore& store,
                    QuotaLedger& ledger, const IngestPlan& plan = {});

}  // namespace polemos
