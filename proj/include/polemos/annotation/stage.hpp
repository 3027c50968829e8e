#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "polemos/core/error.hpp"
#include "polemos/core/time.hpp"

namespace polemos {

/// Annotation-project lifecycle: model, procure, annotate, train/test,
/// evaluate, then either revise (back to annotate) or distribute.
enum class Stage { kModel, kProcure, kAnnotate, kTrainTest, kEvaluate, kRevise, kDistribute };

std::string_view to_string(Stage s);
std::optional<Stage> stage_from_string(std::string_view s);

/// MODEL->PROCURE->ANNOTATE->TRAIN_TEST->EVALUATE->{REVISE->ANNOTATE | DISTRIBUTE}
bool transition_allowed(Stage from, Stage to);

class IllegalTransition : public Error {
 public:
  using Error::Error;
};

struct PipelineStage {
  Stage stage = Stage::kModel;
  Timestamp entered_at{};
  std::string note;
};

/// Append-only stage history; always a path in the transition graph that
/// starts at MODEL.
class PipelineState {
 public:
  explicit PipelineState(Timestamp created = Timestamp{});

  Stage current() const { return history_.back().stage; }
  const std::vector<PipelineStage>& history() const { return history_; }

  /// Throws IllegalTransition when the edge is not in the graph.
  const PipelineStage& advance(Stage to, Timestamp at, std::string note = {});

  nlohmann::json to_json() const;
  /// Re-validates every edge. Throws ParseError.
  static PipelineState from_json(const nlohmann::json& j);

  /// A missing file yields a fresh state at MODEL.
  static PipelineState load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<PipelineStage> history_;
};

/// Free-function form of PipelineState::advance.
inline const PipelineStage& advance_stage(PipelineState& state, Stage to, Timestamp at, std::string note = {}) {
  return state.advance(to, at, std::move(note));
}

}  // namespace polemos
