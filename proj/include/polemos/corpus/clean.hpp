#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"
#include "polemos/corpus/comment.hpp"

namespace polemos {

class CorpusStore;

/// Removal tallies. Each dropped comment is counted under the first rule it
/// fails, in the order empty, non-referential, out-of-window, duplicate.
/// Duplicates are keyed by (video_id, author, text, published_at); the first
/// occurrence survives.
struct CleanReport {
  std::size_t input_count = 0;
  std::size_t removed_empty = 0;
  std::size_t removed_non_referential = 0;
  std::size_t removed_out_of_window = 0;
  std::size_t removed_duplicate = 0;
  std::size_t output_count = 0;

  bool balanced() const {
    return output_count + removed_empty + removed_non_referential + removed_out_of_window +
               removed_duplicate ==
           input_count;
  }

  friend bool operator==(const CleanReport&, const CleanReport&) = default;
};

nlohmann::json to_json(const CleanReport& r);

struct CleanResult {
  std::vector<Comment> kept;
  CleanReport report;
};

/// Pure filter; surviving comments are copied unchanged, in input order.
CleanResult clean_comments(std::span<const Comment> comments, const StudyWindow& window);

/// Reads `raw`, writes survivors to `cleaned` (replacing its contents).
/// The raw store is never modified. Throws InvalidArgument if both stores
/// point at the same file.
CleanReport clean_corpus(const CorpusStore& raw, CorpusStore& cleaned, const StudyWindow& window);

}  // namespace polemos
