#include "polemos/fixtures/inference_server.hpp"

#include <mutex>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "polemos/core/error.hpp"

namespace polemos::fixtures {

struct InferenceServer::Impl {
  const Model& model;
  Options options;
  httplib::Server server;
  std::thread thread;
  int port = 0;
  mutable std::mutex mutex;
  std::size_t requests = 0;
  std::string last;

  Impl(const Model& m, Options o) : model(m), options(std::move(o)) {}
};

InferenceServer::InferenceServer(const Model& model, Options options)
    : impl_(std::make_unique<Impl>(model, std::move(options))) {
  impl_->server.Post("/predict", [this](const httplib::Request& req, httplib::Response& res) {
    {
      std::lock_guard lock(impl_->mutex);
      ++impl_->requests;
      impl_->last = req.body;
    }
    if (impl_->options.delay.count() > 0) std::this_thread::sleep_for(impl_->options.delay);
    if (impl_->options.status != 200) {
      res.status = impl_->options.status;
      res.set_content(R"({"error":"injected"})", "application/json");
      return;
    }
    nlohmann::json results = nlohmann::json::array();
    try {
      const nlohmann::json request = nlohmann::json::parse(req.body);
      for (const auto& t : request.at("texts")) {
        const Prediction p = impl_->model.predict(t.get<std::string>());
        results.push_back({{"code", p.code}, {"probs", p.probs}});
      }
    } catch (const nlohmann::json::exception& e) {
      res.status = 400;
      res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
      return;
    }
    std::string body = nlohmann::json{{"results", std::move(results)}}.dump();
    if (impl_->options.tamper) body = impl_->options.tamper(body);
    res.status = 200;
    res.set_content(body, "application/json");
  });
}

InferenceServer::~InferenceServer() { stop(); }

int InferenceServer::start() {
  if (impl_->thread.joinable()) return impl_->port;
  impl_->server.set_tcp_nodelay(true);
  impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
  if (impl_->port <= 0) throw Error("inference server could not bind a port");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return impl_->port;
}

void InferenceServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string InferenceServer::endpoint() const { return "http://127.0.0.1:" + std::to_string(impl_->port) + "/predict"; }

std::size_t InferenceServer::requests() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->requests;
}

std::string InferenceServer::last_request() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->last;
}

}  // namespace polemos::fixtures
