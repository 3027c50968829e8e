#include "polemos/cli/workspace.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <deque>
#include <map>

namespace polemos {
namespace {

namespace fs = std::filesystem;

// Position along the forward path; REVISE sits just before ANNOTATE.
double rank(Stage s) {
  switch (s) {
    case Stage::kModel: return 0;
    case Stage::kProcure: return 1;
    case Stage::kRevise: return 1.5;
    case Stage::kAnnotate: return 2;
    case Stage::kTrainTest: return 3;
    case Stage::kEvaluate: return 4;
    case Stage::kDistribute: return 5;
  }
  return 0;
}

constexpr Stage kAllStages[] = {Stage::kModel,    Stage::kProcure, Stage::kAnnotate,  Stage::kTrainTest,
                                Stage::kEvaluate, Stage::kRevise,  Stage::kDistribute};

}  // namespace

WorkspaceLock::WorkspaceLock(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw StorageError("cannot open lock file " + path.string() + ": " + std::strerror(errno));
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw LockError("another polemos process is using this workspace (lock " + path.string() + ")");
  }
}

WorkspaceLock::~WorkspaceLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

std::optional<std::vector<Stage>> stage_walk(Stage from, Stage to) {
  if (from == to) return std::vector<Stage>{};
  std::map<Stage, Stage> parent;
  std::deque<Stage> queue{from};
  parent.emplace(from, from);
  while (!queue.empty()) {
    const Stage s = queue.front();
    queue.pop_front();
    for (const Stage next : kAllStages) {
      if (!transition_allowed(s, next) || parent.contains(next)) continue;
      parent.emplace(next, s);
      if (next == to) {
        std::vector<Stage> walk;
        for (Stage at = to; at != from; at = parent.at(at)) walk.insert(walk.begin(), at);
        return walk;
      }
      queue.push_back(next);
    }
  }
  return std::nullopt;
}

Workspace::Workspace(PipelineConfig config, bool force, std::ostream& log, std::function<Timestamp()> clock)
    : config_(std::move(config)),
      force_(force),
      log_(log),
      clock_(std::move(clock)),
      lock_(config_.paths.lock),
      state_(PipelineState::load(config_.paths.stage)) {}

Timestamp Workspace::now() const {
  if (clock_) return clock_();
  return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
}

void Workspace::require_artifact(const fs::path& path, std::string_view producer) {
  if (fs::exists(path)) return;
  const std::string msg =
      "missing " + path.string() + "; run 'polemos " + std::string(producer) + "' first";
  if (!force_) throw StageError(msg);
  log_ << "warning: --force: " << msg << "\n";
}

std::vector<Stage> Workspace::reach(Stage target, std::string_view note, bool revise_loop) {
  const Stage current = state_.current();
  const bool looping = revise_loop && current == Stage::kEvaluate;
  if (!looping && rank(current) >= rank(target)) return {};

  const auto walk = stage_walk(current, target);
  if (!walk) {
    const std::string msg =
        "cannot move from " + std::string(to_string(current)) + " to " + std::string(to_string(target));
    if (!force_) throw StageError(msg);
    log_ << "warning: --force: " << msg << "; stage left unchanged\n";
    return {};
  }
  for (const Stage s : *walk) state_.advance(s, now(), std::string(note));
  state_.save(config_.paths.stage);
  return *walk;
}

}  // namespace polemos
