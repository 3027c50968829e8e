#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "polemos/annotation/session.hpp"
#include "polemos/classifier/remote.hpp"
#include "polemos/classifier/train.hpp"
#include "polemos/core/rational.hpp"
#include "polemos/corpus/comment.hpp"
#include "polemos/ingest/client.hpp"

namespace polemos {

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct ApiConfig {
  std::string base_url = "https://www.googleapis.com/youtube/v3";
  std::chrono::milliseconds timeout{30000};
  int max_retries = 3;
  std::chrono::milliseconds backoff_base{1000};
  int concurrency = 4;
  bool include_replies = false;
  std::optional<std::filesystem::path> allowlist;  // one video id per line
};

struct AnnotationConfig {
  QuotaTarget quota;
  // Oversampled so that rarer labels can still reach the per-label quota.
  std::size_t sample_size = 3000;
  double max_per_video_fraction = 0.1;
  std::chrono::seconds lease{std::chrono::minutes(10)};
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::filesystem::path> static_dir;
  std::optional<int> export_cap_per_label;
};

struct InferenceConfig {
  enum class Mode { kReference, kRemote } mode = Mode::kReference;
  RemoteOptions remote;
};

struct AnalysisConfig {
  std::optional<Timestamp> anchor;
  Timestamp january_start = make_timestamp(2024, 1, 1);
  std::set<int> exclude{3, 4};
};

/// Every artifact location, all resolved against the workspace directory.
struct WorkspacePaths {
  std::filesystem::path root;
  std::filesystem::path raw_store;
  std::filesystem::path video_list;
  std::filesystem::path ingest_report;
  std::filesystem::path clean_store;
  std::filesystem::path clean_report;
  std::filesystem::path sample;
  std::filesystem::path annotations;
  std::filesystem::path training_set;
  std::filesystem::path balance_report;
  std::filesystem::path model;
  std::filesystem::path metrics;
  std::filesystem::path predictions;
  std::filesystem::path prediction_summary;
  std::filesystem::path reports;
  std::filesystem::path stage;
  std::filesystem::path lock;

  std::vector<std::filesystem::path> all() const;
};

struct PipelineConfig {
  StudyWindow window = StudyWindow::conflict_default();
  std::vector<SearchQuery> queries;
  QuotaBudget quota;
  ApiConfig api;
  AnnotationConfig annotation;
  TrainConfig train;
  Rational accuracy_gate{9, 10};
  InferenceConfig inference;
  AnalysisConfig analysis;
  WorkspacePaths paths;

  /// Throws ConfigError when paths collide, the gate is outside (0,1], or a
  /// nested section is invalid.
  void validate() const;
};

/// Defaults rooted at `workdir`.
PipelineConfig default_config(const std::filesystem::path& workdir);

/// Reads a JSON config document. Relative paths inside it, including
/// "workdir", are taken relative to the file's directory; a missing
/// "workdir" means that directory itself. Unknown keys are rejected.
PipelineConfig load_config(const std::filesystem::path& file);
PipelineConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

}  // namespace polemos
