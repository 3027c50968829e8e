#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "polemos/analysis/report.hpp"
#include "polemos/annotation/sampling.hpp"
#include "polemos/annotation/session.hpp"
#include "polemos/classifier/metrics.hpp"
#include "polemos/classifier/predict.hpp"
#include "polemos/cli/config.hpp"
#include "polemos/cli/workspace.hpp"
#include "polemos/corpus/clean.hpp"
#include "polemos/corpus/store.hpp"
#include "polemos/ingest/client.hpp"

namespace polemos {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitStage = 2;
inline constexpr int kExitGate = 3;
inline constexpr int kExitRemote = 4;

/// Maps an exception escaping a subcommand to the process exit code.
int exit_code_for(const std::exception& e);

struct CommandContext {
  PipelineConfig config;
  bool force = false;
  /// Overrides the sampling and training seeds.
  std::optional<std::uint64_t> seed;
  std::ostream* log = nullptr;  // warnings; std::cerr when null
  std::function<Timestamp()> clock;
  /// Platform transport; built from config.api when null.
  std::shared_ptr<HttpTransport> transport;
  std::string api_key;
};

IngestReport cmd_ingest(const CommandContext& ctx);
/// kExitRemote when the report carries quota, HTTP or transport errors.
int ingest_exit_code(const IngestReport& report);

CleanReport cmd_clean(const CommandContext& ctx);

SampleResult cmd_sample(const CommandContext& ctx, std::optional<std::size_t> n = std::nullopt);

struct AnnotateServeOptions {
  std::optional<int> port;
  /// Write the export from the recorded labels without serving.
  bool export_only = false;
  /// Called with the bound port while the server runs; the server stops when
  /// it returns. When empty, serves until SIGINT or SIGTERM.
  std::function<void(int port)> run;
};

struct AnnotateResult {
  QuotaProgress progress;
  BalanceReport balance;
  std::size_t exported_rows = 0;
  bool revise_round = false;
};

nlohmann::json to_json(const AnnotateResult& r);

/// Serves the annotation API over the current sample, then writes the
/// training set and balance report.
AnnotateResult cmd_annotate_serve(const CommandContext& ctx, const AnnotateServeOptions& options = {});

struct TrainOutcome {
  Metrics train;
  Metrics holdout;
  Rational gate;
  bool gate_passed = false;
  std::size_t train_rows = 0;
  std::size_t holdout_rows = 0;
  std::vector<std::string> warnings;
  std::vector<EpochStats> history;
};

nlohmann::json to_json(const TrainOutcome& t);

/// Trains, writes the model and metrics, and moves to EVALUATE. Throws
/// GateFailure (after writing both files) when holdout accuracy is below the
/// gate.
TrainOutcome cmd_train(const CommandContext& ctx);

struct PredictOutcome {
  PredictionSummary summary;
  std::vector<CollapseWarning> collapse;
};

nlohmann::json to_json(const PredictOutcome& p);

/// Requires a model that passed the gate (unless --force).
PredictOutcome cmd_predict(const CommandContext& ctx);

ReportBundle cmd_report(const CommandContext& ctx);

struct StatusReport {
  PipelineState state;
  std::size_t raw_comments = 0;
  CorpusStats clean;
  std::vector<std::pair<std::string, bool>> artifacts;  // name, present
};

nlohmann::json to_json(const StatusReport& s);

/// Read-only; takes no lock.
StatusReport cmd_status(const CommandContext& ctx);

}  // namespace polemos
