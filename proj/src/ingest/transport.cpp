#include "polemos/ingest/transport.hpp"

#include "httplib.h"
#include "polemos/core/url.hpp"

namespace polemos {

HttplibTransport::HttplibTransport(std::string base_url, std::chrono::milliseconds timeout) : timeout_(timeout) {
  Url u = parse_url(base_url);
  origin_ = std::move(u.origin);
  base_path_ = std::move(u.path);
}

HttpResponse HttplibTransport::get(std::string_view endpoint, const QueryParams& params) {
  std::string target = base_path_ + "/" + std::string(endpoint);
  char sep = '?';
  for (const auto& [k, v] : params) {
    target += sep;
    target += percent_encode(k);
    target += '=';
    target += percent_encode(v);
    sep = '&';
  }
  httplib::Client client(origin_);
  client.set_tcp_nodelay(true);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  auto res = client.Get(target);
  if (!res) throw TransportError("GET " + std::string(endpoint) + " failed: " + httplib::to_string(res.error()));
  return {res->status, res->body};
}

}  // namespace polemos
