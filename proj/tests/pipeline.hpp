#pragma once

// Drives the whole command sequence on a synthetic corpus served by the
// mock platform, with a simulated annotator labeling through the HTTP API.

#include <chrono>
#include <sstream>

#include "polemos/cli/commands.hpp"
#include "polemos/fixtures/mock_platform.hpp"
#include "polemos/fixtures/synth.hpp"
#include "polemos/ingest/transport.hpp"

namespace polemos::testing {

struct PipelineSettings {
  fixtures::SynthOptions synth;
  std::size_t sample_size = 3000;
  int per_label = 200;
  std::uint64_t seed = 42;
  bool force_predict = false;  // predict even when the gate failed
};

struct PipelineRun {
  PipelineConfig config;
  IngestReport ingest;
  CleanReport clean;
  SampleResult sample;
  fixtures::SimulatedAnnotation annotation;
  AnnotateResult exported;
  std::optional<TrainOutcome> train;
  std::string gate_failure;
  PredictOutcome predict;
  std::optional<ReportBundle> report;
  double seconds = 0;
  std::string log;
};

inline PipelineConfig pipeline_config(const std::filesystem::path& workdir, const PipelineSettings& s) {
  PipelineConfig cfg = default_config(workdir);
  cfg.window = s.synth.window;
  cfg.queries = {{"israel palestina", s.synth.window.start, s.synth.window.end, 50}};
  cfg.api.backoff_base = std::chrono::milliseconds(1);
  cfg.annotation.quota = QuotaTarget::uniform(s.per_label);
  cfg.annotation.sample_size = s.sample_size;
  cfg.annotation.max_per_video_fraction = 0.2;
  cfg.train.seed = s.seed;
  cfg.validate();
  return cfg;
}

inline PipelineRun run_pipeline(const std::filesystem::path& workdir, const PipelineSettings& s) {
  const auto began = std::chrono::steady_clock::now();
  PipelineRun run;
  const fixtures::SynthCorpus corpus = fixtures::generate_corpus(s.synth);
  fixtures::MockPlatform mock(fixtures::platform_responses(corpus.videos, {}));
  mock.start();

  std::ostringstream log;
  CommandContext ctx;
  ctx.config = pipeline_config(workdir, s);
  ctx.log = &log;
  ctx.clock = [] { return make_timestamp(2024, 2, 1); };
  ctx.transport = std::make_shared<HttplibTransport>(mock.base_url());
  run.config = ctx.config;

  run.ingest = cmd_ingest(ctx);
  run.clean = cmd_clean(ctx);
  run.sample = cmd_sample(ctx);
  AnnotateServeOptions serve;
  serve.run = [&](int port) { run.annotation = fixtures::simulate_annotator(port, corpus.truth, s.per_label); };
  run.exported = cmd_annotate_serve(ctx, serve);
  try {
    run.train = cmd_train(ctx);
  } catch (const GateFailure& e) {
    run.gate_failure = e.what();
    if (!s.force_predict) {
      run.log = log.str();
      return run;
    }
  }
  CommandContext forced = ctx;
  forced.force = s.force_predict;
  run.predict = cmd_predict(forced);
  run.report = cmd_report(forced);
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - began).count();
  run.log = log.str();
  return run;
}

}  // namespace polemos::testing
