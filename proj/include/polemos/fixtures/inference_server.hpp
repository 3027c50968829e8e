#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <string>

#include "polemos/classifier/model.hpp"

namespace polemos::fixtures {

/// Local stand-in for a hosted classifier: POST /predict answers with the
/// given model's predictions. `tamper` may rewrite each response body, and
/// `delay` stalls every answer, for protocol and timeout tests.
class InferenceServer {
 public:
  struct Options {
    std::chrono::milliseconds delay{0};
    int status = 200;
    std::function<std::string(const std::string& body)> tamper;
  };

  InferenceServer(const Model& model, Options options);
  explicit InferenceServer(const Model& model) : InferenceServer(model, Options{}) {}
  ~InferenceServer();
  InferenceServer(const InferenceServer&) = delete;
  InferenceServer& operator=(const InferenceServer&) = delete;

  int start();
  void stop();
  std::string endpoint() const;
  std::size_t requests() const;
  /// Body of the most recent request.
  std::string last_request() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace polemos::fixtures
