#include "polemos/ingest/client.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <unordered_set>

#include "polemos/corpus/store.hpp"

namespace polemos {
using nlohmann::json;

namespace {

std::string error_reason(const std::string& body) {
  try {
    const json j = json::parse(body);
    const json& errs = j.at("error").at("errors");
    if (errs.is_array() && !errs.empty()) return errs[0].value("reason", "");
  } catch (const json::exception&) {
  }
  return {};
}

bool is_quota_reason(const std::string& reason) {
  return reason == "quotaExceeded" || reason == "dailyLimitExceeded";
}

std::string page_token(const json& j) {
  auto it = j.find("nextPageToken");
  if (it == j.end() || !it->is_string()) return {};
  return it->get<std::string>();
}

std::string string_at(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_string()) throw ParseError(std::string("'") + key + "' is not a string");
  return v.get<std::string>();
}

Comment map_comment(const json& comment, const std::string& video_id, bool is_public) {
  const json& s = comment.at("snippet");
  Comment c;
  c.comment_id = string_at(comment, "id");
  if (c.comment_id.empty()) throw ParseError("empty comment id");
  c.author = s.value("authorDisplayName", "");
  c.text = s.contains("textOriginal") ? string_at(s, "textOriginal") : string_at(s, "textDisplay");
  const json& likes = s.at("likeCount");
  if (!likes.is_number_integer() || likes.get<std::int64_t>() < 0) throw ParseError("invalid likeCount");
  c.like_count = likes.get<std::int64_t>();
  c.published_at = parse_rfc3339(string_at(s, "publishedAt"));
  c.video_id = video_id;
  c.is_public = is_public;
  return c;
}

}  // namespace

void SearchQuery::validate() const {
  if (term.empty()) throw InvalidArgument("search term must be non-empty");
  if (!(published_after < published_before)) throw InvalidArgument("search range must satisfy after < before");
  if (max_videos <= 0) throw InvalidArgument("max_videos must be positive");
}

QuotaLedger::QuotaLedger(QuotaBudget budget) : budget_(budget) {
  if (budget.units_spent < 0 || budget.units_spent > budget.units_total)
    throw InvalidArgument("quota budget requires 0 <= spent <= total");
}

bool QuotaLedger::try_debit(std::int64_t cost) {
  std::lock_guard lock(mutex_);
  if (cost > budget_.remaining()) return false;
  budget_.units_spent += cost;
  return true;
}

QuotaBudget QuotaLedger::snapshot() const {
  std::lock_guard lock(mutex_);
  return budget_;
}

std::string_view to_string(IngestErrorKind kind) {
  switch (kind) {
    case IngestErrorKind::kCommentsDisabled: return "comments_disabled";
    case IngestErrorKind::kQuotaExceeded: return "quota_exceeded";
    case IngestErrorKind::kTransientFailure: return "transient_failure";
    case IngestErrorKind::kHttpError: return "http_error";
    case IngestErrorKind::kMalformedItem: return "malformed_item";
    case IngestErrorKind::kMalformedResponse: return "malformed_response";
  }
  return "unknown";
}

PlatformClient::PlatformClient(HttpTransport& transport, ClientOptions options)
    : transport_(transport), options_(std::move(options)) {}

PlatformClient::Attempt PlatformClient::get_with_retry(std::string_view endpoint, const QueryParams& params) {
  Attempt last;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(options_.backoff_base * (1 << (attempt - 1)));
    try {
      HttpResponse r = transport_.get(endpoint, params);
      last.transport_error.clear();
      last.response = std::move(r);
      if (last.response->status < 500) return last;
    } catch (const TransportError& e) {
      last.response.reset();
      last.transport_error = e.what();
    }
  }
  return last;
}

SearchResult PlatformClient::search_videos(const SearchQuery& query, QuotaLedger& ledger) {
  query.validate();
  SearchResult result;
  const auto max_videos = static_cast<std::size_t>(query.max_videos);
  const std::int64_t cost = ledger.snapshot().cost_per_search;
  std::string token;

  while (result.videos.size() < max_videos) {
    if (!ledger.try_debit(cost)) {
      result.outcome = Outcome::kQuotaExceeded;
      result.errors.push_back({"", IngestErrorKind::kQuotaExceeded, "budget cannot cover a search page"});
      break;
    }
    ++result.pages;
    const int want = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(options_.search_page_size),
                                                            max_videos - result.videos.size()));
    QueryParams params{{"part", "snippet"},
                       {"q", query.term},
                       {"type", "video"},
                       {"publishedAfter", format_rfc3339(query.published_after)},
                       {"publishedBefore", format_rfc3339(query.published_before)},
                       {"maxResults", std::to_string(want)}};
    if (!token.empty()) params.emplace_back("pageToken", token);
    if (!options_.api_key.empty()) params.emplace_back("key", options_.api_key);

    const Attempt a = get_with_retry("search", params);
    if (!a.response || a.response->status >= 500) {
      result.outcome = Outcome::kTransientFailure;
      result.errors.push_back({"", IngestErrorKind::kTransientFailure,
                               a.response ? "HTTP " + std::to_string(a.response->status) : a.transport_error});
      break;
    }
    if (a.response->status != 200) {
      const std::string reason = error_reason(a.response->body);
      const bool quota = is_quota_reason(reason);
      result.outcome = quota ? Outcome::kQuotaExceeded : Outcome::kFailed;
      result.errors.push_back({"", quota ? IngestErrorKind::kQuotaExceeded : IngestErrorKind::kHttpError,
                               "HTTP " + std::to_string(a.response->status) + " " + reason});
      break;
    }

    json page;
    try {
      page = json::parse(a.response->body);
      if (!page.at("items").is_array()) throw ParseError("items is not an array");
    } catch (const std::exception& e) {
      result.outcome = Outcome::kFailed;
      result.errors.push_back({"", IngestErrorKind::kMalformedResponse, e.what()});
      break;
    }
    for (const json& item : page["items"]) {
      if (result.videos.size() >= max_videos) break;
      try {
        const json& s = item.at("snippet");
        VideoRef v;
        v.video_id = string_at(item.at("id"), "videoId");
        v.title = s.value("title", "");
        v.channel = s.value("channelTitle", "");
        v.matched_query = query.term;
        v.published_at = parse_rfc3339(string_at(s, "publishedAt"));
        result.videos.push_back(std::move(v));
      } catch (const std::exception& e) {
        result.errors.push_back({"", IngestErrorKind::kMalformedItem, e.what()});
      }
    }
    token = page_token(page);
    if (token.empty()) break;
  }
  return result;
}

FetchResult PlatformClient::fetch_comment_threads(const std::string& video_id, QuotaLedger& ledger,
                                                  const std::function<void(Comment&&)>& sink) {
  FetchResult result;
  result.video_id = video_id;
  const std::int64_t cost = ledger.snapshot().cost_per_thread_page;
  std::string token;

  for (;;) {
    if (!ledger.try_debit(cost)) {
      result.outcome = Outcome::kQuotaExceeded;
      result.errors.push_back({video_id, IngestErrorKind::kQuotaExceeded, "budget cannot cover a thread page"});
      break;
    }
    ++result.pages;
    QueryParams params{{"part", options_.include_replies ? "snippet,replies" : "snippet"},
                       {"videoId", video_id},
                       {"maxResults", std::to_string(options_.thread_page_size)},
                       {"textFormat", "plainText"}};
    if (!token.empty()) params.emplace_back("pageToken", token);
    if (!options_.api_key.empty()) params.emplace_back("key", options_.api_key);

    const Attempt a = get_with_retry("commentThreads", params);
    if (!a.response || a.response->status >= 500) {
      result.outcome = Outcome::kTransientFailure;
      result.errors.push_back({video_id, IngestErrorKind::kTransientFailure,
                               a.response ? "HTTP " + std::to_string(a.response->status) : a.transport_error});
      break;
    }
    if (a.response->status != 200) {
      const std::string reason = error_reason(a.response->body);
      if (reason == "commentsDisabled") {
        result.outcome = Outcome::kCommentsDisabled;
        result.errors.push_back({video_id, IngestErrorKind::kCommentsDisabled, "comments are disabled"});
      } else if (is_quota_reason(reason)) {
        result.outcome = Outcome::kQuotaExceeded;
        result.errors.push_back({video_id, IngestErrorKind::kQuotaExceeded, "platform reported " + reason});
      } else {
        result.outcome = Outcome::kFailed;
        result.errors.push_back(
            {video_id, IngestErrorKind::kHttpError, "HTTP " + std::to_string(a.response->status) + " " + reason});
      }
      break;
    }

    json page;
    try {
      page = json::parse(a.response->body);
      if (!page.at("items").is_array()) throw ParseError("items is not an array");
    } catch (const std::exception& e) {
      result.outcome = Outcome::kFailed;
      result.errors.push_back({video_id, IngestErrorKind::kMalformedResponse, e.what()});
      break;
    }
    for (const json& thread : page["items"]) {
      try {
        const json& ts = thread.at("snippet");
        const bool is_public = ts.value("isPublic", true);
        sink(map_comment(ts.at("topLevelComment"), video_id, is_public));
        ++result.comments;
        if (options_.include_replies && thread.contains("replies")) {
          for (const json& reply : thread["replies"].value("comments", json::array())) {
            sink(map_comment(reply, video_id, is_public));
            ++result.comments;
          }
        }
      } catch (const std::exception& e) {
        result.errors.push_back({video_id, IngestErrorKind::kMalformedItem, e.what()});
      }
    }
    token = page_token(page);
    if (token.empty()) break;
  }
  return result;
}

json to_json(const IngestReport& r) {
  nlohmann::ordered_json j;
  j["videos_found"] = r.videos_found;
  j["videos_with_comments_disabled"] = r.videos_with_comments_disabled;
  j["comments_fetched"] = r.comments_fetched;
  j["pages_fetched"] = r.pages_fetched;
  j["search_pages"] = r.search_pages;
  j["quota_spent"] = r.quota_spent;
  nlohmann::ordered_json errors = nlohmann::ordered_json::array();
  for (const IngestError& e : r.errors)
    errors.push_back({{"video_id", e.video_id}, {"kind", to_string(e.kind)}, {"detail", e.detail}});
  j["errors"] = std::move(errors);
  return j;
}

IngestReport ingest(std::span<const SearchQuery> queries, PlatformClient& client, CorpusStore& store,
                    QuotaLedger& ledger, const IngestPlan& plan) {
  IngestReport report;
  const std::int64_t spent_before = ledger.snapshot().units_spent;

  std::vector<VideoRef> videos;
  std::unordered_set<std::string> seen;
  for (const SearchQuery& q : queries) {
    SearchResult sr = client.search_videos(q, ledger);
    report.search_pages += static_cast<std::size_t>(sr.pages);
    report.errors.insert(report.errors.end(), sr.errors.begin(), sr.errors.end());
    for (VideoRef& v : sr.videos) {
      if (plan.allowlist && !plan.allowlist->contains(v.video_id)) continue;
      if (seen.insert(v.video_id).second) videos.push_back(std::move(v));
    }
  }
  report.videos_found = videos.size();
  if (plan.video_list_path) write_video_list(*plan.video_list_path, videos);

  std::vector<FetchResult> results(videos.size());
  std::vector<std::vector<Comment>> fetched(videos.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < videos.size(); i = next++) {
      results[i] = client.fetch_comment_threads(videos[i].video_id, ledger,
                                                [&fetched, i](Comment&& c) { fetched[i].push_back(std::move(c)); });
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(plan.concurrency, 1)), 1,
                                                      std::max<std::size_t>(videos.size(), 1));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }

  // Appends follow video order so the store is identical run to run.
  for (std::size_t i = 0; i < videos.size(); ++i) {
    const FetchResult& fr = results[i];
    report.pages_fetched += static_cast<std::size_t>(fr.pages);
    report.comments_fetched += fr.comments;
    if (fr.outcome == Outcome::kCommentsDisabled) ++report.videos_with_comments_disabled;
    report.errors.insert(report.errors.end(), fr.errors.begin(), fr.errors.end());
    store.append(fetched[i]);
  }
  report.quota_spent = ledger.snapshot().units_spent - spent_before;
  return report;
}

}  // namespace polemos
