#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "polemos/analysis/views.hpp"
#include "polemos/classifier/metrics.hpp"
#include "polemos/classifier/predict.hpp"
#include "polemos/corpus/comment.hpp"

namespace polemos {

/// Some corpus comments have no prediction.
class CoverageError : public Error {
 public:
  explicit CoverageError(std::vector<std::string> missing);
  const std::vector<std::string>& missing() const { return missing_; }

 private:
  std::vector<std::string> missing_;
};

struct ReportOptions {
  StudyWindow window = StudyWindow::conflict_default();
  std::optional<Timestamp> anchor;  // defaults to window.start
  std::set<int> exclude = default_lead_exclusions();
  /// The January chart shows the bins intersecting [january_start, window.end).
  Timestamp january_start = make_timestamp(2024, 1, 1);
  std::optional<LabelCounts> training_counts;
};

struct ReportBundle {
  std::filesystem::path dir;
  std::vector<std::filesystem::path> files;  // relative to dir, sorted
  LabelCounts counts{};
  TrendSeries trend;
  AffinityReport affinity{};
  std::vector<LeadChangeEvent> lead_changes;
  std::vector<CollapseWarning> collapse;
  nlohmann::ordered_json summary;
};

/// Pairs each corpus comment with its predicted code, in corpus order.
/// Throws CoverageError naming every comment without a prediction.
std::vector<CodedComment> join_predictions(std::span<const Comment> corpus, std::span<const PredictionRow> predictions);

/// Writes counts.csv, trend.csv, affinity.csv, lead_changes.json,
/// summary.json, summary.txt and charts/{counts,trend,trend_january,affinity}.svg.
/// Output depends only on the inputs.
ReportBundle build_report(std::span<const Comment> corpus, std::span<const PredictionRow> predictions,
                          const ReportOptions& options, const std::filesystem::path& out_dir);

}  // namespace polemos
