#include "polemos/fixtures/mock_platform.hpp"

#include <algorithm>
#include <mutex>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "polemos/core/error.hpp"
#include "polemos/core/fileio.hpp"

namespace polemos::fixtures {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kPrefix = "/youtube/v3/";

bool matches(const CannedResponse& r, const std::string& endpoint, const std::map<std::string, std::string>& params) {
  if (r.endpoint != endpoint) return false;
  for (const auto& [k, v] : r.params) {
    auto it = params.find(k);
    if (it == params.end() || it->second != v) return false;
  }
  const auto want = r.params.find("pageToken");
  const auto got = params.find("pageToken");
  if ((want == r.params.end()) != (got == params.end())) return false;
  return true;
}

json error_body(int code, const std::string& reason, const std::string& message) {
  return {{"error", {{"code", code}, {"message", message}, {"errors", json::array({{{"reason", reason}, {"message", message}}})}}}};
}

}  // namespace

struct MockPlatform::Impl {
  std::vector<CannedResponse> responses;
  std::vector<int> failures_left;
  httplib::Server server;
  std::thread thread;
  int port = 0;
  mutable std::mutex mutex;
  std::vector<RecordedRequest> log;
};

MockPlatform::MockPlatform(std::vector<CannedResponse> responses, int port) : impl_(std::make_unique<Impl>()) {
  impl_->responses = std::move(responses);
  impl_->port = port;
  for (const CannedResponse& r : impl_->responses) impl_->failures_left.push_back(r.fail_first);

  impl_->server.Get(R"(/youtube/v3/(\w+))", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string endpoint = req.path.substr(std::string(kPrefix).size());
    std::map<std::string, std::string> params;
    for (const auto& [k, v] : req.params) params[k] = v;

    std::lock_guard lock(impl_->mutex);
    const CannedResponse* best = nullptr;
    std::size_t best_index = 0;
    for (std::size_t i = 0; i < impl_->responses.size(); ++i) {
      const CannedResponse& r = impl_->responses[i];
      if (!matches(r, endpoint, params)) continue;
      if (!best || r.params.size() > best->params.size()) {
        best = &r;
        best_index = i;
      }
    }
    if (!best) {
      res.status = 404;
      res.set_content(error_body(404, "notFound", "no canned response for " + req.target).dump(), "application/json");
    } else if (impl_->failures_left[best_index] > 0) {
      --impl_->failures_left[best_index];
      res.status = 503;
      res.set_content(error_body(503, "backendError", "injected failure").dump(), "application/json");
    } else {
      res.status = best->status;
      res.set_content(best->body, "application/json");
    }
    impl_->log.push_back({endpoint, std::move(params), res.status});
  });
}

MockPlatform::~MockPlatform() { stop(); }

std::vector<CannedResponse> MockPlatform::load_directory(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<CannedResponse> out;
  for (const fs::path& f : files) {
    try {
      const json j = json::parse(read_file(f));
      CannedResponse r;
      r.endpoint = j.at("endpoint").get<std::string>();
      r.params = j.value("params", std::map<std::string, std::string>{});
      r.status = j.value("status", 200);
      const json& body = j.at("body");
      r.body = body.is_string() ? body.get<std::string>() : body.dump();
      r.fail_first = j.value("fail_first", 0);
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ParseError(f.string() + ": " + e.what());
    }
  }
  return out;
}

void MockPlatform::write_directory(const fs::path& dir, std::span<const CannedResponse> responses) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < responses.size(); ++i) {
    const CannedResponse& r = responses[i];
    nlohmann::ordered_json j;
    j["endpoint"] = r.endpoint;
    j["params"] = r.params;
    j["status"] = r.status;
    const json body = json::parse(r.body, nullptr, false);
    j["body"] = body.is_discarded() ? nlohmann::ordered_json(r.body) : nlohmann::ordered_json(body);
    if (r.fail_first) j["fail_first"] = r.fail_first;
    char name[32];
    std::snprintf(name, sizeof name, "%04zu.json", i);
    write_file_atomic(dir / name, j.dump(2) + "\n");
  }
}

int MockPlatform::start() {
  if (impl_->thread.joinable()) return impl_->port;
  impl_->server.set_tcp_nodelay(true);
  if (impl_->port > 0) {
    if (!impl_->server.bind_to_port("127.0.0.1", impl_->port))
      throw Error("mock platform could not bind port " + std::to_string(impl_->port));
  } else {
    impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
    if (impl_->port <= 0) throw Error("mock platform could not bind a port");
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return impl_->port;
}

void MockPlatform::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string MockPlatform::base_url() const { return "http://127.0.0.1:" + std::to_string(impl_->port) + "/youtube/v3"; }

std::vector<RecordedRequest> MockPlatform::requests() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->log;
}

std::size_t MockPlatform::request_count(const std::string& endpoint) const {
  std::lock_guard lock(impl_->mutex);
  return static_cast<std::size_t>(std::count_if(impl_->log.begin(), impl_->log.end(),
                                                [&](const RecordedRequest& r) { return r.endpoint == endpoint; }));
}

std::string thread_item_json(const Comment& c) {
  json top = {{"kind", "youtube#comment"},
              {"id", c.comment_id},
              {"snippet",
               {{"videoId", c.video_id},
                {"textDisplay", c.text},
                {"textOriginal", c.text},
                {"authorDisplayName", c.author},
                {"likeCount", c.like_count},
                {"publishedAt", format_rfc3339(c.published_at)},
                {"updatedAt", format_rfc3339(c.published_at)}}}};
  json item = {{"kind", "youtube#commentThread"},
               {"id", c.comment_id},
               {"snippet",
                {{"videoId", c.video_id},
                 {"topLevelComment", std::move(top)},
                 {"totalReplyCount", 0},
                 {"isPublic", c.is_public}}}};
  return item.dump();
}

std::vector<CannedResponse> platform_responses(std::span<const PlatformVideo> videos,
                                               const PlatformFixtureOptions& options) {
  std::vector<CannedResponse> out;
  const std::size_t sp = static_cast<std::size_t>(options.search_page_size);
  const std::size_t search_pages = std::max<std::size_t>(1, (videos.size() + sp - 1) / sp);
  for (std::size_t p = 0; p < search_pages; ++p) {
    json items = json::array();
    for (std::size_t i = p * sp; i < std::min(videos.size(), (p + 1) * sp); ++i) {
      const VideoRef& v = videos[i].video;
      items.push_back({{"kind", "youtube#searchResult"},
                       {"id", {{"kind", "youtube#video"}, {"videoId", v.video_id}}},
                       {"snippet",
                        {{"title", v.title}, {"channelTitle", v.channel}, {"publishedAt", format_rfc3339(v.published_at)}}}});
    }
    json body = {{"kind", "youtube#searchListResponse"}, {"items", std::move(items)}};
    if (p + 1 < search_pages) body["nextPageToken"] = "S" + std::to_string(p + 1);
    CannedResponse r;
    r.endpoint = "search";
    r.params = {{"q", options.query_term}};
    if (p > 0) r.params["pageToken"] = "S" + std::to_string(p);
    r.body = body.dump();
    out.push_back(std::move(r));
  }

  const std::size_t tp = static_cast<std::size_t>(options.thread_page_size);
  for (const PlatformVideo& pv : videos) {
    const std::string& id = pv.video.video_id;
    if (pv.comments_disabled) {
      CannedResponse r{"commentThreads", {{"videoId", id}}, 403,
                       error_body(403, "commentsDisabled", "The video has disabled comments.").dump(), 0};
      out.push_back(std::move(r));
      continue;
    }
    const std::size_t pages = std::max<std::size_t>(1, (pv.comments.size() + tp - 1) / tp);
    for (std::size_t p = 0; p < pages; ++p) {
      std::string items = "[";
      for (std::size_t i = p * tp; i < std::min(pv.comments.size(), (p + 1) * tp); ++i) {
        if (items.size() > 1) items += ',';
        items += thread_item_json(pv.comments[i]);
      }
      items += "]";
      json body = {{"kind", "youtube#commentThreadListResponse"}};
      body["items"] = json::parse(items);
      if (p + 1 < pages) body["nextPageToken"] = id + "-P" + std::to_string(p + 1);
      CannedResponse r;
      r.endpoint = "commentThreads";
      r.params = {{"videoId", id}};
      if (p > 0) r.params["pageToken"] = id + "-P" + std::to_string(p);
      r.body = body.dump();
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace polemos::fixtures
