#include "polemos/cli/commands.hpp"

#include <csignal>
#include <iostream>
#include <unordered_map>

#include "polemos/annotation/server.hpp"
#include "polemos/core/fileio.hpp"
#include "polemos/corpus/text.hpp"

namespace polemos {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::ostream& log_of(const CommandContext& ctx) { return ctx.log ? *ctx.log : std::cerr; }

Workspace open_workspace(const CommandContext& ctx) {
  return Workspace(ctx.config, ctx.force, log_of(ctx), ctx.clock);
}

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_file_atomic(path, j.dump(2) + "\n");
}

std::set<std::string> read_allowlist(const fs::path& path) {
  std::set<std::string> ids;
  const std::string content = read_file(path);
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string::npos) end = content.size();
    const std::string line(text::trim(std::string_view(content).substr(pos, end - pos)));
    if (!line.empty() && line[0] != '#') ids.insert(line);
    pos = end + 1;
  }
  return ids;
}

struct StoredSample {
  std::uint64_t seed = 0;
  std::vector<std::string> ids;
};

StoredSample read_sample(const fs::path& path) {
  try {
    const json j = json::parse(read_file(path));
    return {j.at("seed").get<std::uint64_t>(), j.at("comment_ids").get<std::vector<std::string>>()};
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

bool file_has_content(const fs::path& p) { return fs::exists(p) && fs::file_size(p) > 0; }

// A revise round is any annotation pass that starts after REVISE was entered
// more recently than the last training run.
bool in_revise_round(const PipelineState& state) {
  for (auto it = state.history().rbegin(); it != state.history().rend(); ++it) {
    if (it->stage == Stage::kRevise) return true;
    if (it->stage == Stage::kTrainTest) return false;
  }
  return false;
}

void serve_until_signal(AnnotationServer& server) {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  int sig = 0;
  sigwait(&set, &sig);
  server.stop();
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const StageError*>(&e) || dynamic_cast<const IllegalTransition*>(&e) ||
      dynamic_cast<const LockError*>(&e))
    return kExitStage;
  if (dynamic_cast<const GateFailure*>(&e)) return kExitGate;
  if (dynamic_cast<const RemoteTimeout*>(&e) || dynamic_cast<const ProtocolError*>(&e) ||
      dynamic_cast<const RemoteFailure*>(&e) || dynamic_cast<const TransportError*>(&e))
    return kExitRemote;
  return kExitFailure;
}

IngestReport cmd_ingest(const CommandContext& ctx) {
  Workspace ws = open_workspace(ctx);
  const PipelineConfig& cfg = ws.config();
  if (cfg.queries.empty()) throw ConfigError("no search queries configured");

  std::shared_ptr<HttpTransport> transport = ctx.transport;
  if (!transport) transport = std::make_shared<HttplibTransport>(cfg.api.base_url, cfg.api.timeout);
  ClientOptions opts;
  opts.api_key = ctx.api_key;
  opts.max_retries = cfg.api.max_retries;
  opts.backoff_base = cfg.api.backoff_base;
  opts.include_replies = cfg.api.include_replies;
  PlatformClient client(*transport, opts);

  IngestPlan plan;
  plan.concurrency = cfg.api.concurrency;
  plan.video_list_path = ws.paths().video_list;
  if (cfg.api.allowlist) plan.allowlist = read_allowlist(*cfg.api.allowlist);

  fs::create_directories(ws.paths().raw_store.parent_path());
  CorpusStore store(ws.paths().raw_store);
  QuotaLedger ledger(cfg.quota);
  IngestReport report = ingest(cfg.queries, client, store, ledger, plan);
  write_json(ws.paths().ingest_report, to_json(report));
  ws.reach(Stage::kProcure, "ingest");
  return report;
}

int ingest_exit_code(const IngestReport& report) {
  for (const IngestError& e : report.errors)
    if (e.kind != IngestErrorKind::kCommentsDisabled && e.kind != IngestErrorKind::kMalformedItem) return kExitRemote;
  return kExitOk;
}

CleanReport cmd_clean(const CommandContext& ctx) {
  Workspace ws = open_workspace(ctx);
  ws.require_artifact(ws.paths().raw_store, "ingest");
  const CorpusStore raw(ws.paths().raw_store);
  fs::create_directories(ws.paths().clean_store.parent_path());
  CorpusStore cleaned(ws.paths().clean_store);
  const CleanReport report = clean_corpus(raw, cleaned, ws.config().window);
  write_json(ws.paths().clean_report, to_json(report));
  ws.reach(Stage::kProcure, "clean");
  return report;
}

SampleResult cmd_sample(const CommandContext& ctx, std::optional<std::size_t> n) {
  Workspace ws = open_workspace(ctx);
  const PipelineConfig& cfg = ws.config();
  ws.require_artifact(ws.paths().clean_store, "clean");
  const std::vector<Comment> corpus = CorpusStore(ws.paths().clean_store).load();
  const std::uint64_t seed = ctx.seed.value_or(cfg.train.seed);
  SampleResult result =
      sample_for_annotation(corpus, n.value_or(cfg.annotation.sample_size), seed, cfg.annotation.max_per_video_fraction);

  if (fs::exists(ws.paths().sample) && file_has_content(ws.paths().annotations) &&
      read_sample(ws.paths().sample).ids != result.comment_ids) {
    const std::string msg = "annotations in " + ws.paths().annotations.string() +
                            " belong to a different sample; move them aside before resampling";
    if (!ws.force()) throw StageError(msg);
    ws.log() << "warning: --force: " << msg << "\n";
  }
  for (const std::string& w : result.warnings) ws.log() << "warning: " << w << "\n";

  json j;
  j["seed"] = seed;
  j["n"] = result.comment_ids.size();
  j["max_per_video_fraction"] = cfg.annotation.max_per_video_fraction;
  j["comment_ids"] = result.comment_ids;
  j["warnings"] = result.warnings;
  write_json(ws.paths().sample, j);
  ws.reach(Stage::kAnnotate, "sample", /*revise_loop=*/true);
  return result;
}

json to_json(const AnnotateResult& r) {
  return {{"progress", to_json(r.progress)},
          {"balance", to_json(r.balance)},
          {"exported_rows", r.exported_rows},
          {"revise_round", r.revise_round}};
}

AnnotateResult cmd_annotate_serve(const CommandContext& ctx, const AnnotateServeOptions& options) {
  Workspace ws = open_workspace(ctx);
  const PipelineConfig& cfg = ws.config();
  ws.require_artifact(ws.paths().sample, "sample");
  ws.require_artifact(ws.paths().clean_store, "clean");
  ws.reach(Stage::kAnnotate, "annotate-serve", /*revise_loop=*/true);

  const StoredSample stored = read_sample(ws.paths().sample);
  std::unordered_map<std::string, Comment> by_id;
  for (Comment& c : CorpusStore(ws.paths().clean_store).load()) {
    std::string id = c.comment_id;
    by_id.emplace(std::move(id), std::move(c));
  }
  std::vector<Comment> sample;
  sample.reserve(stored.ids.size());
  for (const std::string& id : stored.ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw StageError("sampled comment " + id + " is not in the cleaned corpus; rerun 'polemos sample'");
    sample.push_back(it->second);
  }
  std::vector<VideoRef> videos;
  if (fs::exists(ws.paths().video_list)) videos = read_video_list(ws.paths().video_list);

  SessionOptions so;
  so.quota = cfg.annotation.quota;
  so.lease = cfg.annotation.lease;
  so.log_path = ws.paths().annotations;
  so.clock = ctx.clock;
  fs::create_directories(ws.paths().annotations.parent_path());
  AnnotationSession session(sample, so, std::move(videos));

  AnnotateResult result;
  result.revise_round = in_revise_round(ws.state());
  if (result.revise_round) {
    session.set_stage(Stage::kRevise);
    if (fs::exists(ws.paths().model)) {
      const Model model = Model::load(ws.paths().model);
      std::unordered_map<std::string, int> hints;
      for (const Comment& c : sample) hints.emplace(c.comment_id, model.predict(c.text).code);
      session.set_hints(std::move(hints));
    }
  }

  if (!options.export_only) {
    ServerOptions server_opts;
    server_opts.host = cfg.annotation.host;
    server_opts.port = options.port.value_or(cfg.annotation.port);
    server_opts.static_dir = cfg.annotation.static_dir;
    server_opts.export_cap_per_label = cfg.annotation.export_cap_per_label;
    if (server_opts.static_dir && !fs::exists(*server_opts.static_dir)) {
      ws.log() << "warning: static directory " << server_opts.static_dir->string() << " not found; serving the API only\n";
      server_opts.static_dir.reset();
    }
    if (!options.run) {
      // Block the signals before the server threads start so they inherit the mask.
      sigset_t set;
      sigemptyset(&set);
      sigaddset(&set, SIGINT);
      sigaddset(&set, SIGTERM);
      pthread_sigmask(SIG_BLOCK, &set, nullptr);
    }
    AnnotationServer server(session, server_opts);
    const int port = server.start();
    ws.log() << "annotation service on http://" << server_opts.host << ":" << port << "/\n";
    if (options.run) {
      options.run(port);
      server.stop();
    } else {
      serve_until_signal(server);
    }
  }

  result.progress = session.progress();
  if (result.progress.total == 0) {
    ws.log() << "warning: no labels recorded yet; training set not written\n";
    return result;
  }
  const TrainingExport exported = session.export_training_set(cfg.annotation.export_cap_per_label);
  result.balance = exported.balance;
  result.exported_rows = exported.rows.size();
  write_file_atomic(ws.paths().training_set, training_csv(exported));
  write_json(ws.paths().balance_report, to_json(exported.balance));
  for (const int c : exported.balance.undersupplied)
    ws.log() << "warning: label " << c << " (" << label_name(c) << ") has "
             << exported.balance.counts[static_cast<std::size_t>(c)] << " examples, below the target of "
             << exported.balance.per_label_target << "\n";
  return result;
}

json to_json(const TrainOutcome& t) {
  json history = json::array();
  for (const EpochStats& e : t.history) history.push_back({{"loss", e.loss}, {"train_accuracy", e.train_accuracy}});
  return {{"train_rows", t.train_rows},
          {"holdout_rows", t.holdout_rows},
          {"train", to_json(t.train)},
          {"holdout", to_json(t.holdout)},
          {"accuracy_gate", t.gate.to_fixed(4)},
          {"gate_passed", t.gate_passed},
          {"warnings", t.warnings},
          {"history", std::move(history)}};
}

TrainOutcome cmd_train(const CommandContext& ctx) {
  Workspace ws = open_workspace(ctx);
  const PipelineConfig& cfg = ws.config();
  ws.require_artifact(ws.paths().training_set, "annotate-serve");
  const std::vector<LabeledText> data = read_training_csv(ws.paths().training_set);

  TrainConfig tc = cfg.train;
  if (ctx.seed) tc.seed = *ctx.seed;
  ws.reach(Stage::kTrainTest, "train");
  TrainResult trained = train(data, tc);
  for (const std::string& w : trained.warnings) ws.log() << "warning: " << w << "\n";

  TrainOutcome out;
  out.train = evaluate(trained.model, trained.train_set);
  out.train_rows = trained.train_set.size();
  out.holdout_rows = trained.holdout.size();
  if (!trained.holdout.empty()) out.holdout = evaluate(trained.model, trained.holdout);
  out.gate = cfg.accuracy_gate;
  out.gate_passed = !trained.holdout.empty() &&
                    Rational(static_cast<std::int64_t>(out.holdout.correct), static_cast<std::int64_t>(out.holdout.total)) >=
                        cfg.accuracy_gate;
  out.warnings = trained.warnings;
  out.history = trained.model.history();

  fs::create_directories(ws.paths().model.parent_path());
  trained.model.save(ws.paths().model);
  write_json(ws.paths().metrics, to_json(out));
  ws.reach(Stage::kEvaluate, "train");

  if (!out.gate_passed) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "holdout accuracy %.4f is below the accuracy gate %s (%zu holdout examples)",
                  out.holdout.accuracy, cfg.accuracy_gate.to_fixed(4).c_str(), out.holdout_rows);
    throw GateFailure(buf);
  }
  return out;
}

json to_json(const PredictOutcome& p) {
  json collapse = json::array();
  for (const CollapseWarning& w : p.collapse) collapse.push_back({{"code", w.code}, {"message", w.message}});
  json j = to_json(p.summary);
  j["class_collapse"] = std::move(collapse);
  return j;
}

PredictOutcome cmd_predict(const CommandContext& ctx) {
  Workspace ws = open_workspace(ctx);
  const PipelineConfig& cfg = ws.config();
  ws.require_artifact(ws.paths().model, "train");
  ws.require_artifact(ws.paths().metrics, "train");
  ws.require_artifact(ws.paths().clean_store, "clean");

  if (fs::exists(ws.paths().metrics)) {
    bool passed = false;
    try {
      passed = json::parse(read_file(ws.paths().metrics)).at("gate_passed").get<bool>();
    } catch (const json::exception& e) {
      throw ParseError(ws.paths().metrics.string() + ": " + e.what());
    }
    if (!passed) {
      const std::string msg = "the trained model did not pass the accuracy gate " + cfg.accuracy_gate.to_fixed(4) +
                              "; revise the annotations and retrain";
      if (!ws.force()) throw GateFailure(msg);
      ws.log() << "warning: --force: " << msg << "\n";
    }
  }

  const Model model = Model::load(ws.paths().model);
  const std::vector<Comment> corpus = CorpusStore(ws.paths().clean_store).load();
  std::unique_ptr<Predictor> predictor;
  if (cfg.inference.mode == InferenceConfig::Mode::kRemote) predictor = std::make_unique<RemotePredictor>(cfg.inference.remote);
  else predictor = std::make_unique<ReferencePredictor>(model);

  fs::create_directories(ws.paths().predictions.parent_path());
  PredictOutcome out;
  out.summary = predict_corpus(*predictor, corpus, ws.paths().predictions);
  out.collapse = detect_class_collapse(out.summary.counts, model.training_label_counts());
  for (const CollapseWarning& w : out.collapse) ws.log() << "warning: " << w.message << "\n";
  write_json(ws.paths().prediction_summary, to_json(out));
  ws.reach(Stage::kDistribute, "predict");
  return out;
}

ReportBundle cmd_report(const CommandContext& ctx) {
  Workspace ws = open_workspace(ctx);
  const PipelineConfig& cfg = ws.config();
  ws.require_artifact(ws.paths().clean_store, "clean");
  ws.require_artifact(ws.paths().predictions, "predict");
  const std::vector<Comment> corpus = CorpusStore(ws.paths().clean_store).load();
  const std::vector<PredictionRow> predictions = read_predictions(ws.paths().predictions);

  ReportOptions ro;
  ro.window = cfg.window;
  ro.anchor = cfg.analysis.anchor;
  ro.exclude = cfg.analysis.exclude;
  ro.january_start = cfg.analysis.january_start;
  if (fs::exists(ws.paths().model)) ro.training_counts = Model::load(ws.paths().model).training_label_counts();
  ReportBundle bundle = build_report(corpus, predictions, ro, ws.paths().reports);
  ws.reach(Stage::kDistribute, "report");
  return bundle;
}

json to_json(const StatusReport& s) {
  json history = json::array();
  for (const PipelineStage& p : s.state.history())
    history.push_back({{"stage", to_string(p.stage)}, {"entered_at", format_rfc3339(p.entered_at)}, {"note", p.note}});
  json artifacts = json::object();
  for (const auto& [name, present] : s.artifacts) artifacts[name] = present;
  json clean = {{"count", s.clean.count}, {"videos", s.clean.per_video.size()}, {"like_sum", s.clean.like_sum}};
  clean["date_min"] = s.clean.date_min ? json(format_rfc3339(*s.clean.date_min)) : json();
  clean["date_max"] = s.clean.date_max ? json(format_rfc3339(*s.clean.date_max)) : json();
  return {{"stage", to_string(s.state.current())},
          {"history", std::move(history)},
          {"raw_comments", s.raw_comments},
          {"clean", std::move(clean)},
          {"artifacts", std::move(artifacts)}};
}

StatusReport cmd_status(const CommandContext& ctx) {
  const WorkspacePaths& p = ctx.config.paths;
  StatusReport s{PipelineState::load(p.stage), 0, {}, {}};
  if (fs::exists(p.raw_store)) s.raw_comments = CorpusStore(p.raw_store).size();
  if (fs::exists(p.clean_store)) s.clean = CorpusStore(p.clean_store).stats();
  const std::pair<const char*, const fs::path*> named[] = {
      {"raw_store", &p.raw_store}, {"clean_store", &p.clean_store}, {"sample", &p.sample},
      {"annotations", &p.annotations}, {"training_set", &p.training_set}, {"model", &p.model},
      {"metrics", &p.metrics}, {"predictions", &p.predictions}, {"reports", &p.reports},
  };
  for (const auto& [name, path] : named) s.artifacts.emplace_back(name, fs::exists(*path));
  return s;
}

}  // namespace polemos
