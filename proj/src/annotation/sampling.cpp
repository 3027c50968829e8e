#include "polemos/annotation/sampling.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "polemos/core/rng.hpp"

namespace polemos {

SampleResult sample_for_annotation(std::span<const Comment> corpus, std::size_t n, std::uint64_t seed,
                                   double max_per_video_fraction) {
  if (corpus.empty()) throw InsufficientCorpus("cannot sample from an empty corpus");
  if (n > corpus.size())
    throw InsufficientCorpus("requested " + std::to_string(n) + " comments but the corpus holds " +
                             std::to_string(corpus.size()));

  std::vector<const Comment*> pool;
  pool.reserve(corpus.size());
  for (const Comment& c : corpus) pool.push_back(&c);
  std::sort(pool.begin(), pool.end(), [](const Comment* a, const Comment* b) { return a->comment_id < b->comment_id; });

  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + rng.below(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }

  SampleResult result;
  std::map<std::string, std::size_t> per_video;
  for (std::size_t i = 0; i < n; ++i) {
    result.comment_ids.push_back(pool[i]->comment_id);
    ++per_video[pool[i]->video_id];
  }
  for (const auto& [video, count] : per_video) {
    const double share = static_cast<double>(count) / static_cast<double>(n);
    if (share > max_per_video_fraction) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "video %s contributes %zu of %zu sampled comments (%.1f%% > %.1f%%)",
                    video.c_str(), count, n, 100.0 * share, 100.0 * max_per_video_fraction);
      result.warnings.emplace_back(buf);
    }
  }
  return result;
}

}  // namespace polemos
