#include "polemos/analysis/report.hpp"

#include <algorithm>
#include <unordered_map>

#include "polemos/analysis/svg.hpp"
#include "polemos/core/csv.hpp"
#include "polemos/core/fileio.hpp"

namespace polemos {
namespace {

std::string join_ids(const std::vector<std::string>& ids) {
  constexpr std::size_t kShown = 20;
  std::string s;
  for (std::size_t i = 0; i < ids.size() && i < kShown; ++i) {
    if (i) s += ", ";
    s += ids[i];
  }
  if (ids.size() > kShown) s += ", ... (" + std::to_string(ids.size() - kShown) + " more)";
  return s;
}

std::string name_of(int code) { return std::string(label_name(code)); }
std::string display_of(int code) { return std::string(label_schema()[static_cast<std::size_t>(code)].display); }

std::string share(std::int64_t count, std::int64_t total) {
  return total ? Rational(count * 100, total).to_fixed(2) : std::string("0.00");
}

nlohmann::ordered_json event_json(const LeadChangeEvent& e, const TrendSeries& t) {
  nlohmann::ordered_json j;
  j["bin_index"] = e.bin_index;
  j["bin_start"] = format_rfc3339(t.bin(static_cast<std::size_t>(e.bin_index)).start);
  j["previous_leader"] = e.previous_leader;
  j["previous_leader_name"] = name_of(e.previous_leader);
  j["new_leader"] = e.new_leader;
  j["new_leader_name"] = name_of(e.new_leader);
  j["margin"] = e.margin;
  return j;
}

svg::LineChart trend_chart(const TrendSeries& t, std::size_t first, std::size_t last, std::string title) {
  svg::LineChart chart;
  chart.title = std::move(title);
  chart.y_label = "comments";
  for (std::size_t i = first; i < last; ++i) chart.x_labels.push_back(format_date(t.bin(i).start));
  for (int c = 0; c < kNumLabels; ++c) {
    svg::LineSeries s{display_of(c), {}};
    for (std::size_t i = first; i < last; ++i) s.values.push_back(static_cast<double>(t.bins[i][static_cast<std::size_t>(c)]));
    chart.series.push_back(std::move(s));
  }
  return chart;
}

}  // namespace

CoverageError::CoverageError(std::vector<std::string> missing)
    : Error(std::to_string(missing.size()) + " comment(s) have no prediction: " + join_ids(missing)),
      missing_(std::move(missing)) {}

std::vector<CodedComment> join_predictions(std::span<const Comment> corpus, std::span<const PredictionRow> predictions) {
  std::unordered_map<std::string_view, int> code_of;
  code_of.reserve(predictions.size());
  for (const PredictionRow& p : predictions) code_of[p.comment_id] = p.code;
  std::vector<CodedComment> out;
  out.reserve(corpus.size());
  std::vector<std::string> missing;
  for (const Comment& c : corpus) {
    auto it = code_of.find(c.comment_id);
    if (it == code_of.end()) {
      missing.push_back(c.comment_id);
      continue;
    }
    out.push_back({c.comment_id, c.published_at, c.like_count, it->second});
  }
  if (!missing.empty()) throw CoverageError(std::move(missing));
  return out;
}

ReportBundle build_report(std::span<const Comment> corpus, std::span<const PredictionRow> predictions,
                          const ReportOptions& options, const std::filesystem::path& out_dir) {
  const std::vector<CodedComment> coded = join_predictions(corpus, predictions);
  const Timestamp anchor = options.anchor.value_or(options.window.start);

  ReportBundle b;
  b.dir = out_dir;
  b.counts = count_by_label(std::span<const CodedComment>(coded));
  b.trend = bin_by_fortnight(coded, anchor, options.window.end);
  b.affinity = affinity_by_label(coded);
  b.lead_changes = detect_lead_changes(b.trend, options.exclude);
  b.collapse = detect_class_collapse(b.counts, options.training_counts);
  const auto total = static_cast<std::int64_t>(coded.size());

  std::filesystem::create_directories(out_dir / "charts");
  auto emit = [&](const std::filesystem::path& rel, const std::string& content) {
    write_file_atomic(out_dir / rel, content);
    b.files.push_back(rel);
  };

  std::string counts_csv = "label_code,label_name,count,percent\n";
  for (int c = 0; c < kNumLabels; ++c) {
    const auto n = b.counts[static_cast<std::size_t>(c)];
    counts_csv += csv::row({std::to_string(c), name_of(c), std::to_string(n), share(n, total)});
  }
  emit("counts.csv", counts_csv);

  std::string trend_csv = "bin_index,bin_start,label_code,count\n";
  for (std::size_t i = 0; i < b.trend.size(); ++i)
    for (int c = 0; c < kNumLabels; ++c)
      trend_csv += csv::row({std::to_string(i), format_rfc3339(b.trend.bin(i).start), std::to_string(c),
                             std::to_string(b.trend.bins[i][static_cast<std::size_t>(c)])});
  emit("trend.csv", trend_csv);

  std::string affinity_csv = "label_code,label_name,comment_count,like_sum,mean_likes\n";
  for (int c = 0; c < kNumLabels; ++c) {
    const LabelAffinity& a = b.affinity[static_cast<std::size_t>(c)];
    affinity_csv += csv::row({std::to_string(c), name_of(c), std::to_string(a.comment_count), std::to_string(a.like_sum),
                              a.mean_likes ? a.mean_likes->to_fixed(2) : std::string{}});
  }
  emit("affinity.csv", affinity_csv);

  nlohmann::ordered_json events = nlohmann::ordered_json::array();
  for (const LeadChangeEvent& e : b.lead_changes) events.push_back(event_json(e, b.trend));
  nlohmann::ordered_json lead;
  lead["excluded"] = std::vector<int>(options.exclude.begin(), options.exclude.end());
  lead["events"] = events;
  emit("lead_changes.json", lead.dump(2) + "\n");

  // Overall leader and runner-up among the non-excluded labels.
  std::vector<int> ranked;
  for (int c = 0; c < kNumLabels; ++c)
    if (!options.exclude.contains(c)) ranked.push_back(c);
  std::stable_sort(ranked.begin(), ranked.end(), [&](int x, int y) {
    return b.counts[static_cast<std::size_t>(x)] > b.counts[static_cast<std::size_t>(y)];
  });

  nlohmann::ordered_json& s = b.summary;
  s["total_comments"] = total;
  s["window"] = {{"start", format_rfc3339(options.window.start)}, {"end", format_rfc3339(options.window.end)}};
  s["anchor"] = format_rfc3339(anchor);
  s["bins"] = b.trend.size();
  nlohmann::ordered_json counts = nlohmann::ordered_json::array();
  for (int c = 0; c < kNumLabels; ++c) {
    const auto n = b.counts[static_cast<std::size_t>(c)];
    const LabelAffinity& a = b.affinity[static_cast<std::size_t>(c)];
    nlohmann::ordered_json row;
    row["code"] = c;
    row["name"] = name_of(c);
    row["count"] = n;
    row["percent"] = share(n, total);
    row["like_sum"] = a.like_sum;
    row["mean_likes"] = a.mean_likes ? nlohmann::ordered_json(a.mean_likes->to_fixed(2)) : nlohmann::ordered_json();
    counts.push_back(std::move(row));
  }
  s["labels"] = std::move(counts);
  if (ranked.size() >= 2 && b.counts[static_cast<std::size_t>(ranked[1])] > 0) {
    const auto a = b.counts[static_cast<std::size_t>(ranked[0])];
    const auto c = b.counts[static_cast<std::size_t>(ranked[1])];
    s["leading_pair"] = {{"leader", ranked[0]},
                         {"runner_up", ranked[1]},
                         {"percent_difference", format_percent(percent_difference(a, c))}};
  } else {
    s["leading_pair"] = nullptr;
  }
  s["lead_changes"] = events;
  nlohmann::ordered_json collapse = nlohmann::ordered_json::array();
  for (const CollapseWarning& w : b.collapse) collapse.push_back(w.code);
  s["class_collapse"] = collapse;
  emit("summary.json", s.dump(2) + "\n");

  std::string text = "Comments: " + std::to_string(total) + "\n";
  text += "Window: " + format_rfc3339(options.window.start) + " to " + format_rfc3339(options.window.end) + "\n";
  text += "Fortnight bins: " + std::to_string(b.trend.size()) + " from " + format_rfc3339(anchor) + "\n\n";
  for (int c = 0; c < kNumLabels; ++c) {
    const auto n = b.counts[static_cast<std::size_t>(c)];
    const LabelAffinity& a = b.affinity[static_cast<std::size_t>(c)];
    text += "  " + std::to_string(c) + " " + display_of(c) + ": " + std::to_string(n) + " (" + share(n, total) +
            "%), mean likes " + (a.mean_likes ? a.mean_likes->to_fixed(2) : std::string("n/a")) + "\n";
  }
  if (!s["leading_pair"].is_null())
    text += "\n" + display_of(ranked[0]) + " has " + s["leading_pair"]["percent_difference"].get<std::string>() +
            "% more comments than " + display_of(ranked[1]) + "\n";
  text += "\nLead changes (excluding";
  for (const int c : options.exclude) text += " " + std::to_string(c);
  text += "):\n";
  if (b.lead_changes.empty()) text += "  none\n";
  for (const LeadChangeEvent& e : b.lead_changes)
    text += "  bin " + std::to_string(e.bin_index) + " (" + format_date(b.trend.bin(static_cast<std::size_t>(e.bin_index)).start) +
            "): " + display_of(e.previous_leader) + " -> " + display_of(e.new_leader) + ", margin " +
            std::to_string(e.margin) + "\n";
  text += "\nClass collapse:\n";
  if (b.collapse.empty()) text += "  none\n";
  for (const CollapseWarning& w : b.collapse) text += "  WARNING: " + w.message + "\n";
  emit("summary.txt", text);

  svg::BarChart counts_chart{"Comments per stance category", "comments", {}, {}, {}};
  svg::BarChart affinity_chart{"Mean likes per stance category", "mean likes", {}, {}, {}};
  for (int c = 0; c < kNumLabels; ++c) {
    counts_chart.labels.push_back(display_of(c));
    counts_chart.values.push_back(static_cast<double>(b.counts[static_cast<std::size_t>(c)]));
    const LabelAffinity& a = b.affinity[static_cast<std::size_t>(c)];
    affinity_chart.labels.push_back(display_of(c));
    affinity_chart.values.push_back(a.mean_likes ? a.mean_likes->to_double() : 0.0);
    affinity_chart.value_text.push_back(a.mean_likes ? a.mean_likes->to_fixed(2) : "n/a");
  }
  emit("charts/counts.svg", svg::render(counts_chart));
  emit("charts/trend.svg", svg::render(trend_chart(b.trend, 0, b.trend.size(), "Stance categories per fortnight")));

  std::size_t jan_first = b.trend.size();
  for (std::size_t i = 0; i < b.trend.size(); ++i)
    if (b.trend.bin(i).end > options.january_start) {
      jan_first = i;
      break;
    }
  emit("charts/trend_january.svg",
       svg::render(trend_chart(b.trend, jan_first, b.trend.size(), "Stance categories per fortnight, January")));
  emit("charts/affinity.svg", svg::render(affinity_chart));

  std::sort(b.files.begin(), b.files.end());
  return b;
}

}  // namespace polemos
