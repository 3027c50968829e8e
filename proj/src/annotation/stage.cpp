#include "polemos/annotation/stage.hpp"

#include <array>

#include "polemos/core/fileio.hpp"

namespace polemos {
namespace {

constexpr std::array<std::pair<Stage, std::string_view>, 7> kNames{{
    {Stage::kModel, "MODEL"},
    {Stage::kProcure, "PROCURE"},
    {Stage::kAnnotate, "ANNOTATE"},
    {Stage::kTrainTest, "TRAIN_TEST"},
    {Stage::kEvaluate, "EVALUATE"},
    {Stage::kRevise, "REVISE"},
    {Stage::kDistribute, "DISTRIBUTE"},
}};

}  // namespace

std::string_view to_string(Stage s) {
  for (const auto& [stage, name] : kNames)
    if (stage == s) return name;
  return "UNKNOWN";
}

std::optional<Stage> stage_from_string(std::string_view s) {
  for (const auto& [stage, name] : kNames)
    if (name == s) return stage;
  return std::nullopt;
}

bool transition_allowed(Stage from, Stage to) {
  switch (from) {
    case Stage::kModel: return to == Stage::kProcure;
    case Stage::kProcure: return to == Stage::kAnnotate;
    case Stage::kAnnotate: return to == Stage::kTrainTest;
    case Stage::kTrainTest: return to == Stage::kEvaluate;
    case Stage::kEvaluate: return to == Stage::kRevise || to == Stage::kDistribute;
    case Stage::kRevise: return to == Stage::kAnnotate;
    case Stage::kDistribute: return false;
  }
  return false;
}

PipelineState::PipelineState(Timestamp created) { history_.push_back({Stage::kModel, created, "created"}); }

const PipelineStage& PipelineState::advance(Stage to, Timestamp at, std::string note) {
  if (!transition_allowed(current(), to))
    throw IllegalTransition("illegal stage transition " + std::string(to_string(current())) + " -> " +
                            std::string(to_string(to)));
  history_.push_back({to, at, std::move(note)});
  return history_.back();
}

nlohmann::json PipelineState::to_json() const {
  nlohmann::ordered_json j;
  j["current"] = to_string(current());
  nlohmann::ordered_json hist = nlohmann::ordered_json::array();
  for (const PipelineStage& s : history_)
    hist.push_back({{"stage", to_string(s.stage)}, {"entered_at", format_rfc3339(s.entered_at)}, {"note", s.note}});
  j["history"] = std::move(hist);
  return j;
}

PipelineState PipelineState::from_json(const nlohmann::json& j) {
  try {
    const auto& hist = j.at("history");
    if (!hist.is_array() || hist.empty()) throw ParseError("stage history is empty");
    auto parse_entry = [](const nlohmann::json& e) {
      const auto stage = stage_from_string(e.at("stage").get<std::string>());
      if (!stage) throw ParseError("unknown stage " + e.at("stage").dump());
      return PipelineStage{*stage, parse_rfc3339(e.at("entered_at").get<std::string>()),
                           e.value("note", std::string{})};
    };
    PipelineStage first = parse_entry(hist[0]);
    if (first.stage != Stage::kModel) throw ParseError("stage history must start at MODEL");
    PipelineState state(first.entered_at);
    state.history_[0].note = first.note;
    for (std::size_t i = 1; i < hist.size(); ++i) {
      PipelineStage e = parse_entry(hist[i]);
      try {
        state.advance(e.stage, e.entered_at, e.note);
      } catch (const IllegalTransition& ex) {
        throw ParseError(std::string("corrupt stage history: ") + ex.what());
      }
    }
    return state;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("stage state: ") + e.what());
  }
}

PipelineState PipelineState::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return PipelineState(std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now()));
  try {
    return from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void PipelineState::save(const std::filesystem::path& path) const { write_file_atomic(path, to_json().dump(2) + "\n"); }

}  // namespace polemos
