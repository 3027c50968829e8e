#include "polemos/classifier/remote.hpp"

#include <cmath>

#include "httplib.h"
#include "json.hpp"
#include "polemos/classifier/encode.hpp"
#include "polemos/core/url.hpp"

namespace polemos {
namespace {

constexpr std::size_t kExcerptLength = 160;
constexpr double kSumTolerance = 1e-6;

std::string excerpt(std::string_view s) {
  if (s.size() <= kExcerptLength) return std::string(s);
  return std::string(s.substr(0, kExcerptLength)) + "...";
}

[[noreturn]] void protocol_error(const std::string& what, std::string_view payload) {
  throw ProtocolError("remote inference: " + what + "; payload: " + excerpt(payload));
}

}  // namespace

std::string remote_request_body(const RemoteOptions& options, std::span<const std::string> texts) {
  nlohmann::ordered_json body;
  body["texts"] = std::vector<std::string>(texts.begin(), texts.end());
  if (options.send_encoded) {
    const HashedTokenIds ids(kDefaultSalt);
    nlohmann::ordered_json word_ids = nlohmann::ordered_json::array();
    nlohmann::ordered_json mask = nlohmann::ordered_json::array();
    nlohmann::ordered_json type_ids = nlohmann::ordered_json::array();
    for (const std::string& t : texts) {
      const EncodedInput e = encode(tokenize(t), options.sequence_length, ids);
      word_ids.push_back(e.input_word_ids);
      mask.push_back(e.input_mask);
      type_ids.push_back(e.input_type_ids);
    }
    body["inputs"] = {{"input_word_ids", std::move(word_ids)},
                      {"input_mask", std::move(mask)},
                      {"input_type_ids", std::move(type_ids)}};
  }
  return body.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

std::vector<Prediction> parse_remote_response(std::string_view body, std::size_t expected) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error&) {
    protocol_error("response is not JSON", body);
  }
  if (!j.is_object() || !j.contains("results") || !j["results"].is_array())
    protocol_error("missing 'results' array", body);
  const auto& results = j["results"];
  if (results.size() != expected)
    protocol_error("expected " + std::to_string(expected) + " results, got " + std::to_string(results.size()), body);

  std::vector<Prediction> out;
  out.reserve(expected);
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    const std::string where = "result " + std::to_string(i);
    if (!r.is_object() || !r.contains("code") || !r["code"].is_number_integer())
      protocol_error(where + " lacks an integer 'code'", r.dump());
    if (!r.contains("probs") || !r["probs"].is_array() || r["probs"].size() != kNumLabels)
      protocol_error(where + " must carry 7 'probs'", r.dump());
    Prediction p;
    p.code = r["code"].get<int>();
    if (!is_valid_code(p.code)) protocol_error(where + " has code outside 0..6", r.dump());
    double sum = 0.0;
    for (std::size_t c = 0; c < kNumLabels; ++c) {
      const auto& v = r["probs"][c];
      if (!v.is_number()) protocol_error(where + " has a non-numeric probability", r.dump());
      p.probs[c] = v.get<double>();
      if (!std::isfinite(p.probs[c]) || p.probs[c] < 0.0 || p.probs[c] > 1.0)
        protocol_error(where + " has a probability outside [0,1]", r.dump());
      sum += p.probs[c];
    }
    if (std::abs(sum - 1.0) > kSumTolerance)
      protocol_error(where + " probabilities sum to " + std::to_string(sum), r.dump());
    out.push_back(p);
  }
  return out;
}

std::vector<Prediction> remote_predict(const RemoteOptions& options, std::span<const std::string> texts) {
  std::vector<Prediction> out;
  if (texts.empty()) return out;
  if (options.batch_size == 0) throw InvalidArgument("remote batch size must be positive");

  const Url url = parse_url(options.endpoint);
  httplib::Client client(url.origin);
  client.set_tcp_nodelay(true);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  const std::string path = url.path.empty() ? "/predict" : url.path;

  out.reserve(texts.size());
  for (std::size_t start = 0; start < texts.size(); start += options.batch_size) {
    const auto batch = texts.subspan(start, std::min(options.batch_size, texts.size() - start));
    const auto began = std::chrono::steady_clock::now();
    auto res = client.Post(path, remote_request_body(options, batch), "application/json");
    if (!res) {
      const auto err = res.error();
      const auto elapsed = std::chrono::steady_clock::now() - began;
      if (err == httplib::Error::ConnectionTimeout || (err == httplib::Error::Read && elapsed >= options.timeout))
        throw RemoteTimeout("remote inference timed out after " + std::to_string(options.timeout.count()) + " ms");
      throw RemoteFailure("remote inference transport error: " + httplib::to_string(err), 0);
    }
    if (res->status < 200 || res->status >= 300)
      throw RemoteFailure("remote inference returned HTTP " + std::to_string(res->status) + ": " + excerpt(res->body),
                          res->status);
    std::vector<Prediction> part = parse_remote_response(res->body, batch.size());
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace polemos
