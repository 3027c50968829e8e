#pragma once

#include <chrono>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "polemos/core/error.hpp"

namespace polemos {

using QueryParams = std::vector<std::pair<std::string, std::string>>;

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// The request never produced an HTTP status (connect/read failure).
class TransportError : public Error {
 public:
  using Error::Error;
};

/// GET against the platform API; `endpoint` is relative to the base URL
/// ("search", "commentThreads"). Implementations must be callable from
/// several threads at once.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse get(std::string_view endpoint, const QueryParams& params) = 0;
};

/// cpp-httplib backed transport. Base URL like
/// "https://www.googleapis.com/youtube/v3" or a local mock server.
class HttplibTransport final : public HttpTransport {
 public:
  explicit HttplibTransport(std::string base_url, std::chrono::milliseconds timeout = std::chrono::seconds(30));
  HttpResponse get(std::string_view endpoint, const QueryParams& params) override;

 private:
  std::string origin_;
  std::string base_path_;
  std::chrono::milliseconds timeout_;
};

}  // namespace polemos
