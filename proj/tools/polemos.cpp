// polemos: command-line driver for the stance-mapping pipeline.

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "polemos/cli/commands.hpp"
#include "polemos/core/fileio.hpp"

namespace fs = std::filesystem;
using namespace polemos;

namespace {

void print(const nlohmann::json& j) { std::cout << j.dump(2) << "\n"; }

nlohmann::json bundle_json(const ReportBundle& b) {
  nlohmann::json files = nlohmann::json::array();
  for (const fs::path& f : b.files) files.push_back(f.string());
  return {{"dir", b.dir.string()}, {"files", files}, {"summary", b.summary}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Map a stance controversy from platform comments: ingest, clean, sample, annotate, train, predict, report"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  bool force = false;
  app.add_option("--config", config_path, "Pipeline config (JSON); defaults to ./polemos.json when present");
  app.add_option("--seed", seed, "Seed for sampling and training");
  app.add_flag("--force", force, "Run even when stage checks fail (logged)");

  app.add_subcommand("ingest", "Search videos and download their comment threads");
  app.add_subcommand("clean", "Filter the raw corpus into the cleaned corpus");
  auto* sample = app.add_subcommand("sample", "Draw the annotation sample");
  std::optional<std::size_t> sample_n;
  sample->add_option("-n,--n", sample_n, "Sample size (default from config)");
  auto* serve = app.add_subcommand("annotate-serve", "Serve the annotation UI and API; export labels on shutdown");
  std::optional<int> port;
  bool export_only = false;
  serve->add_option("--port", port, "Listen port (default from config)");
  serve->add_flag("--export-only", export_only, "Only write the training set from recorded labels");
  app.add_subcommand("train", "Train the classifier and apply the accuracy gate");
  app.add_subcommand("predict", "Classify the whole cleaned corpus");
  app.add_subcommand("report", "Write tables, charts and the summary");
  app.add_subcommand("status", "Show the pipeline stage and corpus statistics");

  CLI11_PARSE(app, argc, argv);
  const std::string cmd = app.get_subcommands().front()->get_name();

  CommandContext ctx;
  try {
    if (config_path.empty() && fs::exists("polemos.json")) config_path = "polemos.json";
    ctx.config = config_path.empty() ? default_config(fs::current_path()) : load_config(config_path);
    ctx.force = force;
    ctx.seed = seed;
    if (const char* key = std::getenv("PLATFORM_API_KEY")) ctx.api_key = key;

    if (cmd == "ingest") {
      const IngestReport r = cmd_ingest(ctx);
      print(to_json(r));
      return ingest_exit_code(r);
    }
    if (cmd == "clean") print(to_json(cmd_clean(ctx)));
    else if (cmd == "sample") {
      const SampleResult r = cmd_sample(ctx, sample_n);
      print({{"sampled", r.comment_ids.size()}, {"warnings", r.warnings}, {"file", ctx.config.paths.sample.string()}});
    } else if (cmd == "annotate-serve") {
      AnnotateServeOptions opts;
      opts.port = port;
      opts.export_only = export_only;
      print(to_json(cmd_annotate_serve(ctx, opts)));
    } else if (cmd == "train") print(to_json(cmd_train(ctx)));
    else if (cmd == "predict") print(to_json(cmd_predict(ctx)));
    else if (cmd == "report") print(bundle_json(cmd_report(ctx)));
    else if (cmd == "status") print(to_json(cmd_status(ctx)));
    return kExitOk;
  } catch (const GateFailure& e) {
    if (cmd == "train" && fs::exists(ctx.config.paths.metrics)) std::cout << read_file(ctx.config.paths.metrics);
    std::cerr << "error: " << e.what() << "\n";
    return kExitGate;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}
