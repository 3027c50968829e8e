// polemos-synth: synthetic platform fixtures for trying the pipeline
// without network access.
//
//   polemos-synth generate --out DIR     canned API responses + truth.csv
//   polemos-synth serve --fixtures DIR   mock platform API until Ctrl-C
//   polemos-synth annotate --port P --truth FILE
//                                        label a running annotation service

#include <csignal>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "polemos/core/csv.hpp"
#include "polemos/core/fileio.hpp"
#include "polemos/fixtures/mock_platform.hpp"
#include "polemos/fixtures/synth.hpp"

namespace fs = std::filesystem;
using namespace polemos;

int main(int argc, char** argv) {
  CLI::App app{"Synthetic fixtures for polemos"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "Write a mock API fixture directory and the truth labels");
  fs::path out_dir;
  fixtures::SynthOptions so;
  int disabled = 1;
  gen->add_option("--out", out_dir, "Output directory")->required();
  gen->add_option("--comments", so.comments, "Number of comments");
  gen->add_option("--videos", so.videos, "Number of videos");
  gen->add_option("--seed", so.seed, "Generator seed");
  gen->add_option("--disabled", disabled, "How many videos have comments disabled");
  gen->add_flag("--entangle-code0", so.entangle_code0, "Word Anti-Hamas comments with Anti-Palestino/Pro-Israel vocabulary");

  auto* serve = app.add_subcommand("serve", "Serve a fixture directory as the platform API");
  fs::path fixture_dir;
  int port = 8090;
  serve->add_option("--fixtures", fixture_dir, "Fixture directory")->required();
  serve->add_option("--port", port, "Listen port (0 picks one)");

  auto* annotate = app.add_subcommand("annotate", "Label a running annotation service from truth.csv");
  fs::path truth_path;
  int ann_port = 8080;
  int per_label = 200;
  annotate->add_option("--truth", truth_path, "truth.csv from generate")->required();
  annotate->add_option("--port", ann_port, "Annotation service port");
  annotate->add_option("--per-label", per_label, "Labels per category");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      for (int i = 0; i < disabled; ++i) so.disabled_videos.push_back(static_cast<std::size_t>(i));
      const fixtures::SynthCorpus corpus = fixtures::generate_corpus(so);
      fixtures::MockPlatform::write_directory(out_dir / "api", fixtures::platform_responses(corpus.videos, {}));
      std::vector<std::pair<std::string, int>> truth(corpus.truth.begin(), corpus.truth.end());
      std::sort(truth.begin(), truth.end());
      std::string csv_text = "comment_id,code\n";
      for (const auto& [id, code] : truth) csv_text += csv::row({id, std::to_string(code)});
      write_file_atomic(out_dir / "truth.csv", csv_text);
      std::cout << "wrote " << (out_dir / "api").string() << " and " << (out_dir / "truth.csv").string() << "\n";
      return 0;
    }
    if (*serve) {
      sigset_t set;
      sigemptyset(&set);
      sigaddset(&set, SIGINT);
      sigaddset(&set, SIGTERM);
      pthread_sigmask(SIG_BLOCK, &set, nullptr);
      fixtures::MockPlatform mock(fixtures::MockPlatform::load_directory(fixture_dir), port);
      mock.start();
      std::cout << "mock platform API at " << mock.base_url() << std::endl;
      int sig = 0;
      sigwait(&set, &sig);
      return 0;
    }
    if (*annotate) {
      std::unordered_map<std::string, int> truth;
      const auto rows = csv::parse(read_file(truth_path));
      for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].size() == 2) truth.emplace(rows[i][0], std::stoi(rows[i][1]));
      const auto sim = fixtures::simulate_annotator(ann_port, truth, per_label);
      nlohmann::json j = {{"labeled", sim.labeled}, {"skipped", sim.skipped}};
      std::cout << j.dump(2) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
