#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "polemos/annotation/schema.hpp"
#include "polemos/corpus/comment.hpp"
#include "polemos/fixtures/mock_platform.hpp"

namespace polemos::fixtures {

struct SynthOptions {
  std::size_t comments = 5000;  // including the dirty ones
  std::size_t videos = 24;
  std::uint64_t seed = 7;
  StudyWindow window = StudyWindow::conflict_default();
  /// Share of comments whose wording comes from a different label than the
  /// one an annotator would assign.
  double label_noise = 0.02;
  /// Share of comments the cleaner should drop (empty, emoji-only,
  /// duplicates, out of window).
  double dirty = 0.03;
  /// Code-0 comments are worded with the code-2 or code-5 vocabulary only.
  bool entangle_code0 = false;
  /// Videos (by position) whose comments are disabled on the platform.
  std::vector<std::size_t> disabled_videos;
};

struct SynthCorpus {
  std::vector<PlatformVideo> videos;
  /// Intended label of every comment that survives cleaning.
  std::unordered_map<std::string, int> truth;

  std::vector<Comment> all_comments() const;
};

/// Spanish comments drawn from seven label vocabularies plus shared filler,
/// spread over the window. Label shares drift over time (Pro-Palestino
/// leads early, Anti-Israel late) and like counts differ per label.
/// Deterministic given the options.
SynthCorpus generate_corpus(const SynthOptions& options);

const std::array<std::vector<std::string>, kNumLabels>& label_vocabulary();

struct SimulatedAnnotation {
  LabelCounts labeled{};
  std::size_t skipped = 0;
  std::size_t requests = 0;
};

/// Drives a running annotation service over HTTP as one annotator who
/// labels each task with its truth code until that label (counting labels
/// already on the server) reaches
/// per_label_target, skipping the rest, until the sample is exhausted or
/// every label is full. Throws Error on an unexpected HTTP status.
SimulatedAnnotation simulate_annotator(int port, const std::unordered_map<std::string, int>& truth,
                                       int per_label_target, const std::string& annotator = "sim");

}  // namespace polemos::fixtures
