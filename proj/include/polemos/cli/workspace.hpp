#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "polemos/annotation/stage.hpp"
#include "polemos/cli/config.hpp"

namespace polemos {

/// A predecessor artifact is missing or the pipeline is in the wrong stage.
class StageError : public Error {
 public:
  using Error::Error;
};

/// Holdout accuracy is below the configured gate.
class GateFailure : public Error {
 public:
  using Error::Error;
};

/// Another process holds the workspace lock.
class LockError : public Error {
 public:
  using Error::Error;
};

/// Exclusive advisory lock (flock) on a file, released on destruction.
class WorkspaceLock {
 public:
  explicit WorkspaceLock(const std::filesystem::path& path);
  ~WorkspaceLock();
  WorkspaceLock(const WorkspaceLock&) = delete;
  WorkspaceLock& operator=(const WorkspaceLock&) = delete;

 private:
  int fd_ = -1;
};

/// Shortest walk from `from` to `to` along allowed transitions, excluding
/// `from` itself. Empty when from == to; nullopt when unreachable.
std::optional<std::vector<Stage>> stage_walk(Stage from, Stage to);

/// Locked view of one pipeline working directory.
class Workspace {
 public:
  Workspace(PipelineConfig config, bool force, std::ostream& log, std::function<Timestamp()> clock = {});

  const PipelineConfig& config() const { return config_; }
  const WorkspacePaths& paths() const { return config_.paths; }
  const PipelineState& state() const { return state_; }
  bool force() const { return force_; }
  std::ostream& log() { return log_; }
  Timestamp now() const;

  /// StageError naming the file and the subcommand that produces it, or a
  /// warning under --force.
  void require_artifact(const std::filesystem::path& path, std::string_view producer);

  /// Moves the stage forward to `target` along allowed edges when the
  /// pipeline has not reached it yet; a later stage is left alone, so
  /// reruns do not touch history. With `revise_loop`, a pipeline sitting at
  /// EVALUATE goes through REVISE back to ANNOTATE. Returns the stages
  /// entered.
  std::vector<Stage> reach(Stage target, std::string_view note, bool revise_loop = false);

 private:
  PipelineConfig config_;
  bool force_;
  std::ostream& log_;
  std::function<Timestamp()> clock_;
  WorkspaceLock lock_;
  PipelineState state_;
};

}  // namespace polemos
