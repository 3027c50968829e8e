#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "polemos/annotation/schema.hpp"
#include "polemos/annotation/stage.hpp"
#include "polemos/classifier/train.hpp"
#include "polemos/corpus/comment.hpp"

namespace polemos {

class NotInSample : public Error {
 public:
  using Error::Error;
};

class InvalidLabel : public Error {
 public:
  using Error::Error;
};

struct QuotaTarget {
  int per_label_target = 200;
  int total_target = 1400;

  static QuotaTarget uniform(int per_label) { return {per_label, per_label * kNumLabels}; }
};

struct AnnotationRecord {
  std::string comment_id;
  int code = 0;
  std::string annotator;
  Timestamp annotated_at{};
};

struct QuotaProgress {
  LabelCounts counts{};
  int per_label_target = 0;
  std::int64_t total = 0;
  std::int64_t total_target = 0;

  bool label_met(int code) const { return counts[static_cast<std::size_t>(code)] >= per_label_target; }
  bool all_met() const;
};

nlohmann::json to_json(const QuotaProgress& p);

struct Task {
  Comment comment;
  std::optional<VideoRef> video;
  Timestamp lease_expires{};
};

nlohmann::json to_json(const Task& t);

struct BalanceReport {
  LabelCounts counts{};
  int per_label_target = 0;
  std::vector<int> undersupplied;  // codes below target

  bool balanced() const { return undersupplied.empty(); }
};

nlohmann::json to_json(const BalanceReport& b);

struct TrainingExport {
  std::vector<LabeledText> rows;
  BalanceReport balance;
};

/// One line of the audit trail: a label or an undo.
struct AuditEvent {
  enum class Kind { kLabel, kUndo } kind = Kind::kLabel;
  std::string comment_id;  // empty for undo
  int code = -1;
  std::string annotator;
  Timestamp at{};
};

struct SessionOptions {
  QuotaTarget quota;
  std::chrono::seconds lease{std::chrono::minutes(10)};
  /// Append-only audit log; replayed when the session is constructed.
  std::optional<std::filesystem::path> log_path;
  std::function<Timestamp()> clock;
};

/// Annotation session over a fixed sample.
///
/// At most one active record per (comment, annotator); re-labeling pushes a
/// new record over the old one and undo pops it, with every event kept in the
/// audit trail. next_task hands out comments nobody has labeled yet, in
/// sample order, under short leases so concurrent annotators do not collide.
/// In REVISE with prediction hints, comments hinted as undersupplied labels
/// are offered first. Label writes are exclusive; reads are shared.
class AnnotationSession {
 public:
  AnnotationSession(std::vector<Comment> sample, SessionOptions options, std::vector<VideoRef> videos = {});

  /// nullopt means the sample is exhausted for this annotator.
  std::optional<Task> next_task(const std::string& annotator);

  /// Throws NotInSample or InvalidLabel; StorageError if the log append fails
  /// (the session is then unchanged).
  QuotaProgress record_label(const std::string& comment_id, int code, const std::string& annotator);

  /// Retracts this annotator's most recent label, restoring whatever it had
  /// overwritten. Returns the retracted record, or nullopt if none.
  std::optional<AnnotationRecord> undo_last(const std::string& annotator);

  /// Passes over a comment for this annotator only: its lease is released
  /// and next_task stops offering it to them. Not persisted.
  void skip(const std::string& comment_id, const std::string& annotator);

  QuotaProgress progress() const;

  /// Active records in sample order, then by annotator name.
  std::vector<AnnotationRecord> active_records() const;

  /// (text, code) rows in active_records() order. With a cap, at most
  /// cap_per_label rows per label are kept, earliest first.
  TrainingExport export_training_set(std::optional<int> cap_per_label = std::nullopt) const;

  std::vector<AuditEvent> audit_trail() const;
  std::size_t sample_size() const { return sample_.size(); }

  void set_stage(Stage stage);
  void set_hints(std::unordered_map<std::string, int> predicted_codes);

 private:
  using Key = std::pair<std::string, std::string>;  // comment_id, annotator

  Timestamp now() const;
  void apply(const AuditEvent& e);
  void persist(const AuditEvent& e);
  QuotaProgress progress_locked() const;
  bool labeled_by_anyone(const std::string& comment_id) const;

  std::vector<Comment> sample_;
  std::unordered_map<std::string, std::size_t> index_;
  std::unordered_map<std::string, VideoRef> videos_;
  SessionOptions options_;

  mutable std::shared_mutex mutex_;
  std::map<Key, std::vector<AnnotationRecord>> records_;  // stack per key, top is active
  std::unordered_map<std::string, std::vector<Key>> per_annotator_;
  std::unordered_map<std::string, std::pair<std::string, Timestamp>> leases_;  // comment -> (annotator, expiry)
  std::set<Key> skipped_;
  std::vector<AuditEvent> audit_;
  Stage stage_ = Stage::kAnnotate;
  std::unordered_map<std::string, int> hints_;
};

/// CSV with header "text,code", RFC 4180 quoting.
std::string training_csv(const TrainingExport& e);
/// Throws ParseError on a bad header, field count or code.
std::vector<LabeledText> read_training_csv(const std::filesystem::path& path);

}  // namespace polemos
