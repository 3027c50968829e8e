#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "polemos/core/error.hpp"
#include "polemos/corpus/comment.hpp"

namespace polemos {

class InsufficientCorpus : public Error {
 public:
  using Error::Error;
};

struct SampleResult {
  std::vector<std::string> comment_ids;
  std::vector<std::string> warnings;
};

/// Uniform sample of n comment ids without replacement.
///
/// Candidates are ordered by comment_id before a seeded partial
/// Fisher-Yates pass, so the result depends only on corpus content, n and
/// seed, not on storage order. A warning (never a failure) is emitted for
/// each video contributing more than max_per_video_fraction of the sample.
SampleResult sample_for_annotation(std::span<const Comment> corpus, std::size_t n, std::uint64_t seed,
                                   double max_per_video_fraction = 0.1);

}  // namespace polemos
