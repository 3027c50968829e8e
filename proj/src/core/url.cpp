#include "polemos/core/url.hpp"

#include "polemos/core/error.hpp"

namespace polemos {

Url parse_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) throw InvalidArgument("URL without scheme: " + std::string(url));
  const std::string_view scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw InvalidArgument("unsupported URL scheme: " + std::string(url));
  const auto host_start = scheme_end + 3;
  const auto path_start = url.find('/', host_start);
  Url u;
  if (path_start == std::string_view::npos) {
    u.origin = std::string(url);
  } else {
    u.origin = std::string(url.substr(0, path_start));
    u.path = std::string(url.substr(path_start));
  }
  if (u.origin.size() == host_start) throw InvalidArgument("URL without host: " + std::string(url));
  while (!u.path.empty() && u.path.back() == '/') u.path.pop_back();
  return u;
}

std::string percent_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (const char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_' ||
        c == '.' || c == '~') {
      out += ch;
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 15];
    }
  }
  return out;
}

}  // namespace polemos
