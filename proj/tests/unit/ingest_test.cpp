#include <numeric>

#include "doctest.h"
#include "platform_fixture.hpp"
#include "polemos/corpus/store.hpp"
#include "polemos/ingest/client.hpp"
#include "polemos/ingest/transport.hpp"
#include "support.hpp"

using namespace polemos;
using fixtures::CannedResponse;
using fixtures::MockPlatform;

namespace {

SearchQuery query(int max_videos = 50) {
  return {"israel palestina", make_timestamp(2023, 10, 7), make_timestamp(2024, 1, 8), max_videos};
}

ClientOptions fast_options() {
  ClientOptions o;
  o.backoff_base = std::chrono::milliseconds(1);
  return o;
}

// Counts calls and replays a scripted status sequence before delegating.
class ScriptedTransport final : public HttpTransport {
 public:
  explicit ScriptedTransport(HttpTransport& inner) : inner_(inner) {}
  std::vector<int> fail_with;  // consumed front to back; 0 means throw TransportError
  int calls = 0;
  HttpResponse get(std::string_view endpoint, const QueryParams& params) override {
    ++calls;
    if (!fail_with.empty()) {
      const int s = fail_with.front();
      fail_with.erase(fail_with.begin());
      if (s == 0) throw TransportError("connection reset");
      return {s, R"({"error":{"code":503,"errors":[{"reason":"backendError"}]}})"};
    }
    return inner_.get(endpoint, params);
  }

 private:
  HttpTransport& inner_;
};

}  // namespace

TEST_CASE("ingest against the six-video fixture") {
  const auto videos = testing::six_video_fixture();
  MockPlatform mock(fixtures::platform_responses(videos, {}));
  mock.start();
  HttplibTransport transport(mock.base_url(), std::chrono::seconds(5));
  PlatformClient client(transport, fast_options());
  testing::TempDir dir("ingest");
  CorpusStore store(dir / "raw.jsonl");
  QuotaLedger ledger(QuotaBudget{});
  const std::vector<SearchQuery> qs{query()};

  IngestPlan plan;
  plan.video_list_path = dir / "videos.jsonl";
  const IngestReport r = ingest(qs, client, store, ledger, plan);

  std::size_t expected_comments = 0;
  for (const auto& v : videos) expected_comments += v.comments.size();
  CHECK(r.videos_found == 6);
  CHECK(r.videos_with_comments_disabled == 1);
  CHECK(r.comments_fetched == expected_comments);
  CHECK(r.search_pages == 1);
  CHECK(r.pages_fetched == 5 * 3 + 1);
  CHECK(r.quota_spent == 100 * 1 + 1 * 16);
  CHECK(ledger.snapshot().units_spent == r.quota_spent);
  REQUIRE(r.errors.size() == 1);
  CHECK(r.errors[0].kind == IngestErrorKind::kCommentsDisabled);
  CHECK(r.errors[0].video_id == "vid3");
  CHECK(store.size() == expected_comments);
  CHECK(read_video_list(dir / "videos.jsonl").size() == 6);
  CHECK(mock.request_count("commentThreads") == 16);

  // Second run fetches again but stores nothing new.
  const IngestReport again = ingest(qs, client, store, ledger, plan);
  CHECK(again.comments_fetched == expected_comments);
  CHECK(store.size() == expected_comments);
}

TEST_CASE("stored order is independent of concurrency") {
  const auto videos = testing::six_video_fixture(20);
  MockPlatform mock(fixtures::platform_responses(videos, {.search_page_size = 50, .thread_page_size = 20}));
  mock.start();
  HttplibTransport transport(mock.base_url());
  ClientOptions o = fast_options();
  o.thread_page_size = 20;
  PlatformClient client(transport, o);
  const std::vector<SearchQuery> qs{query()};
  testing::TempDir dir("order");
  std::vector<std::string> ids[2];
  for (int c : {1, 4}) {
    CorpusStore store(dir / ("raw" + std::to_string(c) + ".jsonl"));
    QuotaLedger ledger(QuotaBudget{});
    ingest(qs, client, store, ledger, {.concurrency = c});
    for (const Comment& x : store.load()) ids[c == 1 ? 0 : 1].push_back(x.comment_id);
  }
  CHECK(ids[0] == ids[1]);
  CHECK(ids[0].size() == 5 * 41 + 0 + 1 + 2 + 4 + 5);
}

TEST_CASE("search pages and maxResults honor max_videos") {
  std::vector<fixtures::PlatformVideo> videos(7);
  for (int i = 0; i < 7; ++i) {
    videos[i].video.video_id = "v" + std::to_string(i);
    videos[i].video.published_at = make_timestamp(2023, 11, 1);
  }
  MockPlatform mock(fixtures::platform_responses(videos, {.search_page_size = 3}));
  mock.start();
  HttplibTransport transport(mock.base_url());
  ClientOptions o = fast_options();
  o.search_page_size = 3;
  PlatformClient client(transport, o);
  QuotaLedger ledger(QuotaBudget{});
  const SearchResult r = client.search_videos(query(5), ledger);
  CHECK(r.videos.size() == 5);
  CHECK(r.pages == 2);
  CHECK(ledger.snapshot().units_spent == 200);
  const auto reqs = mock.requests();
  REQUIRE(reqs.size() == 2);
  CHECK(reqs[0].params.at("maxResults") == "3");
  CHECK(reqs[1].params.at("maxResults") == "2");
  CHECK(reqs[1].params.at("pageToken") == "S1");
  CHECK(reqs[0].params.at("publishedAfter") == "2023-10-07T00:00:00Z");
}

TEST_CASE("quota exhaustion stops before the request") {
  const auto videos = testing::six_video_fixture();
  MockPlatform mock(fixtures::platform_responses(videos, {}));
  mock.start();
  HttplibTransport transport(mock.base_url());
  PlatformClient client(transport, fast_options());
  testing::TempDir dir("quota");
  CorpusStore store(dir / "raw.jsonl");
  QuotaLedger ledger(QuotaBudget{.units_total = 105});
  const std::vector<SearchQuery> qs{query()};
  const IngestReport r = ingest(qs, client, store, ledger, {.concurrency = 1});
  CHECK(r.search_pages == 1);
  CHECK(r.pages_fetched == 5);
  CHECK(r.quota_spent == 105);
  CHECK(ledger.snapshot().remaining() == 0);
  CHECK(mock.request_count("commentThreads") == 5);
  const auto quota_errors = std::count_if(r.errors.begin(), r.errors.end(), [](const IngestError& e) {
    return e.kind == IngestErrorKind::kQuotaExceeded;
  });
  CHECK(quota_errors >= 1);

  QuotaLedger empty(QuotaBudget{.units_total = 50});
  const SearchResult sr = client.search_videos(query(), empty);
  CHECK(sr.outcome == Outcome::kQuotaExceeded);
  CHECK(sr.pages == 0);
  CHECK(empty.snapshot().units_spent == 0);
}

TEST_CASE("transient failures are retried without extra quota") {
  auto responses = fixtures::platform_responses(testing::six_video_fixture(), {});
  for (auto& r : responses)
    if (r.endpoint == "commentThreads" && r.params.at("videoId") == "vid0" && !r.params.contains("pageToken"))
      r.fail_first = 2;
  MockPlatform mock(responses);
  mock.start();
  HttplibTransport transport(mock.base_url());
  PlatformClient client(transport, fast_options());
  QuotaLedger ledger(QuotaBudget{});
  std::size_t n = 0;
  const FetchResult fr = client.fetch_comment_threads("vid0", ledger, [&](Comment&&) { ++n; });
  CHECK(fr.outcome == Outcome::kComplete);
  CHECK(fr.pages == 3);
  CHECK(n == 201);
  CHECK(ledger.snapshot().units_spent == 3);
  CHECK(mock.request_count("commentThreads") == 5);
}

TEST_CASE("retries give up after max_retries") {
  const auto videos = testing::six_video_fixture();
  MockPlatform mock(fixtures::platform_responses(videos, {}));
  mock.start();
  HttplibTransport inner(mock.base_url());
  ScriptedTransport transport(inner);
  transport.fail_with = {503, 0, 503, 503};
  ClientOptions o = fast_options();
  o.max_retries = 3;
  PlatformClient client(transport, o);
  QuotaLedger ledger(QuotaBudget{});
  const FetchResult fr = client.fetch_comment_threads("vid0", ledger, [](Comment&&) {});
  CHECK(fr.outcome == Outcome::kTransientFailure);
  CHECK(transport.calls == 4);
  CHECK(fr.pages == 1);
  REQUIRE(fr.errors.size() == 1);
  CHECK(fr.errors[0].kind == IngestErrorKind::kTransientFailure);
}

TEST_CASE("platform quota and http errors are classified") {
  std::vector<CannedResponse> responses{
      {"commentThreads", {{"videoId", "q"}}, 403, R"({"error":{"errors":[{"reason":"quotaExceeded"}]}})", 0},
      {"commentThreads", {{"videoId", "n"}}, 404, R"({"error":{"errors":[{"reason":"videoNotFound"}]}})", 0},
      {"commentThreads", {{"videoId", "m"}}, 200, R"({"items": 5})", 0},
  };
  MockPlatform mock(responses);
  mock.start();
  HttplibTransport transport(mock.base_url());
  PlatformClient client(transport, fast_options());
  QuotaLedger ledger(QuotaBudget{});
  auto sink = [](Comment&&) {};
  CHECK(client.fetch_comment_threads("q", ledger, sink).outcome == Outcome::kQuotaExceeded);
  const FetchResult nf = client.fetch_comment_threads("n", ledger, sink);
  CHECK(nf.outcome == Outcome::kFailed);
  CHECK(nf.errors.at(0).kind == IngestErrorKind::kHttpError);
  CHECK(client.fetch_comment_threads("m", ledger, sink).errors.at(0).kind == IngestErrorKind::kMalformedResponse);
}

TEST_CASE("malformed items are skipped and reported") {
  Comment good = testing::make_comment("g1", "texto valido", make_timestamp(2023, 11, 1), 3, "mv");
  const std::string body = std::string(R"({"items":[)") + fixtures::thread_item_json(good) +
                           R"(,{"snippet":{"topLevelComment":{"id":"b1","snippet":{"textOriginal":"x","likeCount":-4,"publishedAt":"2023-11-01T00:00:00Z"}}}}]})";
  MockPlatform mock({{"commentThreads", {{"videoId", "mv"}}, 200, body, 0}});
  mock.start();
  HttplibTransport transport(mock.base_url());
  PlatformClient client(transport, fast_options());
  QuotaLedger ledger(QuotaBudget{});
  std::vector<Comment> got;
  const FetchResult fr = client.fetch_comment_threads("mv", ledger, [&](Comment&& c) { got.push_back(std::move(c)); });
  CHECK(fr.outcome == Outcome::kComplete);
  REQUIRE(got.size() == 1);
  CHECK(got[0] == good);
  REQUIRE(fr.errors.size() == 1);
  CHECK(fr.errors[0].kind == IngestErrorKind::kMalformedItem);
}

TEST_CASE("api key and allowlist") {
  const auto videos = testing::six_video_fixture();
  MockPlatform mock(fixtures::platform_responses(videos, {}));
  mock.start();
  HttplibTransport transport(mock.base_url());
  ClientOptions o = fast_options();
  o.api_key = "k-123";
  PlatformClient client(transport, o);
  testing::TempDir dir("allow");
  CorpusStore store(dir / "raw.jsonl");
  QuotaLedger ledger(QuotaBudget{});
  const std::vector<SearchQuery> qs{query()};
  IngestPlan plan;
  plan.allowlist = std::set<std::string>{"vid1", "vid3"};
  const IngestReport r = ingest(qs, client, store, ledger, plan);
  CHECK(r.videos_found == 2);
  CHECK(r.videos_with_comments_disabled == 1);
  CHECK(r.comments_fetched == videos[1].comments.size());
  for (const auto& req : mock.requests()) CHECK(req.params.at("key") == "k-123");
}

TEST_CASE("search query validation") {
  CHECK_THROWS_AS(SearchQuery({"", make_timestamp(2023, 1, 1), make_timestamp(2023, 2, 1), 5}).validate(),
                  InvalidArgument);
  CHECK_THROWS_AS(SearchQuery({"x", make_timestamp(2023, 2, 1), make_timestamp(2023, 1, 1), 5}).validate(),
                  InvalidArgument);
  CHECK_THROWS_AS(SearchQuery({"x", make_timestamp(2023, 1, 1), make_timestamp(2023, 2, 1), 0}).validate(),
                  InvalidArgument);
  CHECK_THROWS_AS(QuotaLedger(QuotaBudget{.units_total = 10, .units_spent = 11}), InvalidArgument);
}

TEST_CASE("transport errors surface as TransportError") {
  HttplibTransport transport("http://127.0.0.1:1", std::chrono::milliseconds(200));
  CHECK_THROWS_AS(transport.get("search", {}), TransportError);
}
