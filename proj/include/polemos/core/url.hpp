#pragma once

#include <string>
#include <string_view>

namespace polemos {

/// "http://127.0.0.1:8080/youtube/v3" -> origin "http://127.0.0.1:8080",
/// path "/youtube/v3". Trailing slashes are removed from the path.
struct Url {
  std::string origin;
  std::string path;
};

/// Throws InvalidArgument unless the scheme is http or https.
Url parse_url(std::string_view url);

std::string percent_encode(std::string_view s);

}  // namespace polemos
