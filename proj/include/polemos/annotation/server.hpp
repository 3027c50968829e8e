#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "polemos/annotation/session.hpp"

namespace polemos {

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 0;  // 0 picks a free port
  std::optional<std::filesystem::path> static_dir;
  std::optional<int> export_cap_per_label;
};

/// HTTP JSON front end for an AnnotationSession.
///
///   GET  /api/next?annotator=X   task JSON, 204 when exhausted
///   POST /api/label              {comment_id, code, annotator} -> progress
///   POST /api/undo               {annotator} -> retracted record, 204 if none
///   POST /api/skip               {comment_id, annotator} -> 204
///   GET  /api/progress
///   GET  /api/schema
///   GET  /api/export             text/csv, columns text,code
///
/// Errors come back as {"error": kind, "message": ...} with 400 (malformed
/// request), 404 (NotInSample) or 422 (InvalidLabel).
class AnnotationServer {
 public:
  AnnotationServer(AnnotationSession& session, ServerOptions options);
  ~AnnotationServer();
  AnnotationServer(const AnnotationServer&) = delete;
  AnnotationServer& operator=(const AnnotationServer&) = delete;

  /// Binds and starts serving on a background thread; returns the port.
  int start();
  void stop();
  /// Blocks until stop() is called from elsewhere.
  void wait();
  int port() const { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

}  // namespace polemos
