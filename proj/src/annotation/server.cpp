#include "polemos/annotation/server.hpp"

#include <thread>

#include "httplib.h"

namespace polemos {
namespace {

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view kind, std::string_view message) {
  send_json(res, status, {{"error", kind}, {"message", message}});
}

nlohmann::json schema_json() {
  nlohmann::json labels = nlohmann::json::array();
  for (const LabelInfo& l : label_schema())
    labels.push_back({{"code", l.code}, {"name", l.name}, {"display", l.display}, {"rubric", l.rubric}});
  return {{"labels", std::move(labels)}};
}

nlohmann::json record_json(const AnnotationRecord& r) {
  return {{"comment_id", r.comment_id},
          {"code", r.code},
          {"annotator", r.annotator},
          {"annotated_at", format_rfc3339(r.annotated_at)}};
}

}  // namespace

struct AnnotationServer::Impl {
  AnnotationSession& session;
  ServerOptions options;
  httplib::Server server;
  std::thread thread;

  Impl(AnnotationSession& s, ServerOptions o) : session(s), options(std::move(o)) { routes(); }

  void routes() {
    server.Get("/api/next", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string annotator = req.get_param_value("annotator");
      if (annotator.empty()) return send_error(res, 400, "BadRequest", "annotator query parameter is required");
      const auto task = session.next_task(annotator);
      if (!task) {
        res.status = 204;
        return;
      }
      send_json(res, 200, to_json(*task));
    });

    server.Post("/api/label", [this](const httplib::Request& req, httplib::Response& res) {
      std::string comment_id, annotator;
      int code = -1;
      try {
        const auto body = nlohmann::json::parse(req.body);
        comment_id = body.at("comment_id").get<std::string>();
        code = body.at("code").get<int>();
        annotator = body.at("annotator").get<std::string>();
      } catch (const nlohmann::json::exception& e) {
        return send_error(res, 400, "BadRequest", e.what());
      }
      try {
        send_json(res, 200, to_json(session.record_label(comment_id, code, annotator)));
      } catch (const InvalidLabel& e) {
        send_error(res, 422, "InvalidLabel", e.what());
      } catch (const NotInSample& e) {
        send_error(res, 404, "NotInSample", e.what());
      } catch (const InvalidArgument& e) {
        send_error(res, 400, "BadRequest", e.what());
      }
    });

    server.Post("/api/undo", [this](const httplib::Request& req, httplib::Response& res) {
      std::string annotator;
      try {
        annotator = nlohmann::json::parse(req.body).at("annotator").get<std::string>();
      } catch (const nlohmann::json::exception& e) {
        return send_error(res, 400, "BadRequest", e.what());
      }
      const auto undone = session.undo_last(annotator);
      if (!undone) {
        res.status = 204;
        return;
      }
      send_json(res, 200, {{"undone", record_json(*undone)}, {"progress", to_json(session.progress())}});
    });

    server.Post("/api/skip", [this](const httplib::Request& req, httplib::Response& res) {
      std::string comment_id, annotator;
      try {
        const auto body = nlohmann::json::parse(req.body);
        comment_id = body.at("comment_id").get<std::string>();
        annotator = body.at("annotator").get<std::string>();
      } catch (const nlohmann::json::exception& e) {
        return send_error(res, 400, "BadRequest", e.what());
      }
      try {
        session.skip(comment_id, annotator);
        res.status = 204;
      } catch (const NotInSample& e) {
        send_error(res, 404, "NotInSample", e.what());
      }
    });

    server.Get("/api/progress", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, to_json(session.progress()));
    });

    server.Get("/api/schema", [](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, schema_json());
    });

    server.Get("/api/export", [this](const httplib::Request&, httplib::Response& res) {
      res.status = 200;
      res.set_content(training_csv(session.export_training_set(options.export_cap_per_label)), "text/csv; charset=utf-8");
    });

    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        send_error(res, 500, "Internal", e.what());
      } catch (...) {
        send_error(res, 500, "Internal", "unknown error");
      }
    });

    if (options.static_dir) server.set_mount_point("/", options.static_dir->string());
  }
};

AnnotationServer::AnnotationServer(AnnotationSession& session, ServerOptions options)
    : impl_(std::make_unique<Impl>(session, std::move(options))) {}

AnnotationServer::~AnnotationServer() { stop(); }

int AnnotationServer::start() {
  if (impl_->thread.joinable()) return port_;
  auto& o = impl_->options;
  impl_->server.set_tcp_nodelay(true);
  if (o.port == 0) {
    port_ = impl_->server.bind_to_any_port(o.host);
  } else {
    port_ = impl_->server.bind_to_port(o.host, o.port) ? o.port : -1;
  }
  if (port_ <= 0) throw Error("cannot bind annotation server to " + o.host + ":" + std::to_string(o.port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port_;
}

void AnnotationServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

void AnnotationServer::wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace polemos
