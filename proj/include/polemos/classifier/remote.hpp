#pragma once

#include <chrono>
#include <span>
#include <string>
#include <vector>

#include "polemos/classifier/model.hpp"
#include "polemos/core/error.hpp"

namespace polemos {

class RemoteTimeout : public Error {
 public:
  using Error::Error;
};

/// The service answered with something that violates the wire contract.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// Non-2xx status or a transport failure other than a timeout.
class RemoteFailure : public Error {
 public:
  RemoteFailure(const std::string& what, int status) : Error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

struct RemoteOptions {
  /// Full URL of the predict route, e.g. "http://127.0.0.1:8501/predict".
  std::string endpoint;
  std::chrono::milliseconds timeout{30000};
  std::size_t batch_size = 32;
  /// Also send the three encoder tensors next to the raw texts.
  bool send_encoded = false;
  std::size_t sequence_length = 128;
};

/// POST {"texts":[...]} per batch, expecting
/// {"results":[{"code":int,"probs":[7 floats]}, ...]} with one result per
/// text. Each vector must have 7 finite entries in [0,1] summing to 1 within
/// 1e-6 and a code in 0..6. Batches go out sequentially; an empty input
/// sends nothing.
std::vector<Prediction> remote_predict(const RemoteOptions& options, std::span<const std::string> texts);

/// Builds the request body for one batch.
std::string remote_request_body(const RemoteOptions& options, std::span<const std::string> texts);

/// Validates and decodes one response body. Throws ProtocolError carrying an
/// excerpt of the offending payload.
std::vector<Prediction> parse_remote_response(std::string_view body, std::size_t expected);

}  // namespace polemos
