#include "polemos/annotation/session.hpp"

#include <algorithm>
#include <charconv>
#include <mutex>

#include "polemos/core/csv.hpp"
#include "polemos/core/fileio.hpp"

namespace polemos {
namespace {

Timestamp system_now() {
  return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
}

std::string event_line(const AuditEvent& e) {
  nlohmann::ordered_json j;
  if (e.kind == AuditEvent::Kind::kLabel) {
    j["event"] = "label";
    j["comment_id"] = e.comment_id;
    j["code"] = e.code;
  } else {
    j["event"] = "undo";
  }
  j["annotator"] = e.annotator;
  j["at"] = format_rfc3339(e.at);
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

AuditEvent parse_event(const nlohmann::json& j) {
  AuditEvent e;
  const std::string kind = j.at("event").get<std::string>();
  if (kind == "label") {
    e.kind = AuditEvent::Kind::kLabel;
    e.comment_id = j.at("comment_id").get<std::string>();
    e.code = j.at("code").get<int>();
  } else if (kind == "undo") {
    e.kind = AuditEvent::Kind::kUndo;
  } else {
    throw ParseError("unknown annotation event '" + kind + "'");
  }
  e.annotator = j.at("annotator").get<std::string>();
  e.at = parse_rfc3339(j.at("at").get<std::string>());
  return e;
}

}  // namespace

bool QuotaProgress::all_met() const {
  for (int c = 0; c < kNumLabels; ++c)
    if (!label_met(c)) return false;
  return total >= total_target;
}

nlohmann::json to_json(const QuotaProgress& p) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json labels = nlohmann::ordered_json::array();
  for (const LabelInfo& l : label_schema()) {
    const auto c = static_cast<std::size_t>(l.code);
    labels.push_back({{"code", l.code},
                      {"name", l.name},
                      {"count", p.counts[c]},
                      {"target", p.per_label_target},
                      {"met", p.label_met(l.code)}});
  }
  j["labels"] = std::move(labels);
  j["total"] = p.total;
  j["total_target"] = p.total_target;
  j["all_met"] = p.all_met();
  return j;
}

nlohmann::json to_json(const Task& t) {
  nlohmann::json j = to_json(t.comment);
  if (t.video) {
    j["video_title"] = t.video->title;
    j["video_channel"] = t.video->channel;
  }
  j["lease_expires"] = format_rfc3339(t.lease_expires);
  return j;
}

nlohmann::json to_json(const BalanceReport& b) {
  nlohmann::ordered_json j;
  j["per_label_target"] = b.per_label_target;
  j["counts"] = b.counts;
  j["undersupplied"] = b.undersupplied;
  j["balanced"] = b.balanced();
  return j;
}

AnnotationSession::AnnotationSession(std::vector<Comment> sample, SessionOptions options, std::vector<VideoRef> videos)
    : sample_(std::move(sample)), options_(std::move(options)) {
  if (options_.quota.per_label_target < 0 || options_.quota.total_target < 0)
    throw InvalidArgument("quota targets must be non-negative");
  for (std::size_t i = 0; i < sample_.size(); ++i)
    if (!index_.emplace(sample_[i].comment_id, i).second)
      throw InvalidArgument("duplicate comment in sample: " + sample_[i].comment_id);
  for (VideoRef& v : videos) {
    std::string id = v.video_id;
    videos_.emplace(std::move(id), std::move(v));
  }

  if (options_.log_path && std::filesystem::exists(*options_.log_path)) {
    const std::string content = read_file(*options_.log_path);
    std::size_t pos = 0;
    while (pos < content.size()) {
      std::size_t end = content.find('\n', pos);
      if (end == std::string::npos) end = content.size();
      const std::string_view line(content.data() + pos, end - pos);
      pos = end + 1;
      if (line.empty()) continue;
      try {
        AuditEvent e = parse_event(nlohmann::json::parse(line));
        if (e.kind == AuditEvent::Kind::kLabel && (!index_.contains(e.comment_id) || !is_valid_code(e.code)))
          throw ParseError("event refers to a comment outside the sample or an invalid code");
        apply(e);
      } catch (const nlohmann::json::exception& ex) {
        throw ParseError(options_.log_path->string() + ": " + ex.what());
      }
    }
  }
}

Timestamp AnnotationSession::now() const { return options_.clock ? options_.clock() : system_now(); }

void AnnotationSession::apply(const AuditEvent& e) {
  if (e.kind == AuditEvent::Kind::kLabel) {
    Key key{e.comment_id, e.annotator};
    records_[key].push_back({e.comment_id, e.code, e.annotator, e.at});
    per_annotator_[e.annotator].push_back(std::move(key));
    leases_.erase(e.comment_id);
  } else {
    auto& stack = per_annotator_[e.annotator];
    if (stack.empty()) return;
    const Key key = stack.back();
    stack.pop_back();
    auto it = records_.find(key);
    if (it != records_.end()) {
      it->second.pop_back();
      if (it->second.empty()) records_.erase(it);
    }
  }
  audit_.push_back(e);
}

void AnnotationSession::persist(const AuditEvent& e) {
  if (options_.log_path) append_file_atomic(*options_.log_path, event_line(e));
}

bool AnnotationSession::labeled_by_anyone(const std::string& comment_id) const {
  auto it = records_.lower_bound(Key{comment_id, std::string{}});
  return it != records_.end() && it->first.first == comment_id;
}

std::optional<Task> AnnotationSession::next_task(const std::string& annotator) {
  std::unique_lock lock(mutex_);
  const Timestamp t = now();

  std::vector<std::size_t> order;
  order.reserve(sample_.size());
  if (stage_ == Stage::kRevise && !hints_.empty()) {
    const QuotaProgress p = progress_locked();
    std::vector<std::size_t> later;
    for (std::size_t i = 0; i < sample_.size(); ++i) {
      auto h = hints_.find(sample_[i].comment_id);
      const bool preferred = h != hints_.end() && is_valid_code(h->second) && !p.label_met(h->second);
      (preferred ? order : later).push_back(i);
    }
    order.insert(order.end(), later.begin(), later.end());
  } else {
    for (std::size_t i = 0; i < sample_.size(); ++i) order.push_back(i);
  }

  // An annotator keeps the task they already hold until they label it.
  std::optional<std::size_t> chosen;
  for (const std::size_t i : order) {
    const std::string& id = sample_[i].comment_id;
    if (labeled_by_anyone(id)) continue;
    auto lease = leases_.find(id);
    if (lease != leases_.end() && lease->second.first == annotator && lease->second.second > t) {
      chosen = i;
      break;
    }
  }
  if (!chosen) {
    for (const std::size_t i : order) {
      const std::string& id = sample_[i].comment_id;
      if (labeled_by_anyone(id) || skipped_.contains(Key{id, annotator})) continue;
      auto lease = leases_.find(id);
      if (lease != leases_.end() && lease->second.second > t && lease->second.first != annotator) continue;
      chosen = i;
      break;
    }
  }
  if (!chosen) return std::nullopt;

  const Comment& c = sample_[*chosen];
  const Timestamp expiry = t + options_.lease;
  leases_[c.comment_id] = {annotator, expiry};
  Task task{c, std::nullopt, expiry};
  if (auto v = videos_.find(c.video_id); v != videos_.end()) task.video = v->second;
  return task;
}

QuotaProgress AnnotationSession::record_label(const std::string& comment_id, int code, const std::string& annotator) {
  if (!is_valid_code(code)) throw InvalidLabel("label code " + std::to_string(code) + " is outside 0..6");
  if (annotator.empty()) throw InvalidArgument("annotator name is required");
  std::unique_lock lock(mutex_);
  if (!index_.contains(comment_id)) throw NotInSample("comment " + comment_id + " is not in the annotation sample");
  AuditEvent e{AuditEvent::Kind::kLabel, comment_id, code, annotator, now()};
  persist(e);
  apply(e);
  return progress_locked();
}

std::optional<AnnotationRecord> AnnotationSession::undo_last(const std::string& annotator) {
  std::unique_lock lock(mutex_);
  auto it = per_annotator_.find(annotator);
  if (it == per_annotator_.end() || it->second.empty()) return std::nullopt;
  const Key key = it->second.back();
  const AnnotationRecord retracted = records_.at(key).back();
  AuditEvent e{AuditEvent::Kind::kUndo, {}, -1, annotator, now()};
  persist(e);
  apply(e);
  return retracted;
}

void AnnotationSession::skip(const std::string& comment_id, const std::string& annotator) {
  std::unique_lock lock(mutex_);
  if (!index_.contains(comment_id)) throw NotInSample("comment " + comment_id + " is not in the annotation sample");
  skipped_.insert(Key{comment_id, annotator});
  if (auto it = leases_.find(comment_id); it != leases_.end() && it->second.first == annotator) leases_.erase(it);
}

QuotaProgress AnnotationSession::progress_locked() const {
  QuotaProgress p;
  p.per_label_target = options_.quota.per_label_target;
  p.total_target = options_.quota.total_target;
  for (const auto& [key, stack] : records_) {
    ++p.counts[static_cast<std::size_t>(stack.back().code)];
    ++p.total;
  }
  return p;
}

QuotaProgress AnnotationSession::progress() const {
  std::shared_lock lock(mutex_);
  return progress_locked();
}

std::vector<AnnotationRecord> AnnotationSession::active_records() const {
  std::shared_lock lock(mutex_);
  std::vector<AnnotationRecord> out;
  for (const Comment& c : sample_) {
    for (auto it = records_.lower_bound(Key{c.comment_id, std::string{}});
         it != records_.end() && it->first.first == c.comment_id; ++it)
      out.push_back(it->second.back());
  }
  return out;
}

TrainingExport AnnotationSession::export_training_set(std::optional<int> cap_per_label) const {
  const std::vector<AnnotationRecord> records = active_records();
  TrainingExport e;
  e.balance.per_label_target = options_.quota.per_label_target;
  for (const AnnotationRecord& r : records) {
    auto& count = e.balance.counts[static_cast<std::size_t>(r.code)];
    if (cap_per_label && count >= *cap_per_label) continue;
    ++count;
    e.rows.push_back({sample_[index_.at(r.comment_id)].text, r.code});
  }
  for (int c = 0; c < kNumLabels; ++c)
    if (e.balance.counts[static_cast<std::size_t>(c)] < e.balance.per_label_target) e.balance.undersupplied.push_back(c);
  return e;
}

std::vector<AuditEvent> AnnotationSession::audit_trail() const {
  std::shared_lock lock(mutex_);
  return audit_;
}

void AnnotationSession::set_stage(Stage stage) {
  std::unique_lock lock(mutex_);
  stage_ = stage;
}

void AnnotationSession::set_hints(std::unordered_map<std::string, int> predicted_codes) {
  std::unique_lock lock(mutex_);
  hints_ = std::move(predicted_codes);
}

std::string training_csv(const TrainingExport& e) {
  std::string out = "text,code\n";
  for (const LabeledText& r : e.rows) out += csv::row({r.text, std::to_string(r.code)});
  return out;
}

std::vector<LabeledText> read_training_csv(const std::filesystem::path& path) {
  const auto rows = csv::parse(read_file(path));
  if (rows.empty() || rows[0] != std::vector<std::string>{"text", "code"})
    throw ParseError(path.string() + ": expected header text,code");
  std::vector<LabeledText> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() == 1 && r[0].empty()) continue;
    if (r.size() != 2) throw ParseError(path.string() + ": row " + std::to_string(i + 1) + " needs 2 fields");
    int code = -1;
    const auto [ptr, ec] = std::from_chars(r[1].data(), r[1].data() + r[1].size(), code);
    if (ec != std::errc{} || ptr != r[1].data() + r[1].size() || !is_valid_code(code))
      throw ParseError(path.string() + ": row " + std::to_string(i + 1) + " has an invalid code");
    out.push_back({r[0], code});
  }
  return out;
}

}  // namespace polemos
