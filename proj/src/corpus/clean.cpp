#include "polemos/corpus/clean.hpp"

#include <set>
#include <tuple>

#include "polemos/core/error.hpp"
#include "polemos/corpus/store.hpp"
#include "polemos/corpus/text.hpp"

namespace polemos {

nlohmann::json to_json(const CleanReport& r) {
  return nlohmann::ordered_json{{"input_count", r.input_count},
                                {"removed_empty", r.removed_empty},
                                {"removed_non_referential", r.removed_non_referential},
                                {"removed_out_of_window", r.removed_out_of_window},
                                {"removed_duplicate", r.removed_duplicate},
                                {"output_count", r.output_count},
                                {"duplicate_key", "video_id,author,text,published_at"}};
}

CleanResult clean_comments(std::span<const Comment> comments, const StudyWindow& window) {
  using Key = std::tuple<std::string_view, std::string_view, std::string_view, Timestamp>;
  CleanResult out;
  out.report.input_count = comments.size();
  std::set<Key> seen;
  for (const Comment& c : comments) {
    if (text::trim(c.text).empty()) {
      ++out.report.removed_empty;
    } else if (!text::is_referential(c.text)) {
      ++out.report.removed_non_referential;
    } else if (!window.contains(c.published_at)) {
      ++out.report.removed_out_of_window;
    } else if (!seen.emplace(c.video_id, c.author, c.text, c.published_at).second) {
      ++out.report.removed_duplicate;
    } else {
      out.kept.push_back(c);
    }
  }
  out.report.output_count = out.kept.size();
  return out;
}

CleanReport clean_corpus(const CorpusStore& raw, CorpusStore& cleaned, const StudyWindow& window) {
  std::error_code ec;
  if (raw.path() == cleaned.path() || std::filesystem::equivalent(raw.path(), cleaned.path(), ec))
    throw InvalidArgument("cleaned corpus must be written to a distinct dataset");
  const std::vector<Comment> input = raw.load();
  CleanResult result = clean_comments(input, window);
  cleaned.replace_all(result.kept);
  return result.report;
}

}  // namespace polemos
