#include "polemos/cli/config.hpp"

#include <algorithm>
#include <initializer_list>

#include "polemos/core/fileio.hpp"

namespace polemos {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void allow_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> keys) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& [k, v] : obj.items())
    if (std::find(keys.begin(), keys.end(), k) == keys.end())
      throw ConfigError("unknown key '" + k + "' in " + std::string(where));
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

Timestamp read_time(const json& v) { return parse_rfc3339(v.get<std::string>()); }

fs::path resolve(const fs::path& base, const json& v) {
  const fs::path p = v.get<std::string>();
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

Rational read_rational(const json& v) {
  if (v.is_string()) return Rational::from_decimal(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (v.is_number()) return Rational::from_decimal(v.dump());
  throw ConfigError("expected a decimal number");
}

WorkspacePaths default_paths(const fs::path& root) {
  WorkspacePaths p;
  p.root = root;
  p.raw_store = root / "data" / "raw.jsonl";
  p.video_list = root / "data" / "videos.jsonl";
  p.ingest_report = root / "data" / "ingest_report.json";
  p.clean_store = root / "data" / "clean.jsonl";
  p.clean_report = root / "data" / "clean_report.json";
  p.sample = root / "annotation" / "sample.json";
  p.annotations = root / "annotation" / "records.jsonl";
  p.training_set = root / "annotation" / "training.csv";
  p.balance_report = root / "annotation" / "balance.json";
  p.model = root / "model" / "model.json";
  p.metrics = root / "model" / "metrics.json";
  p.predictions = root / "predictions" / "predictions.csv";
  p.prediction_summary = root / "predictions" / "summary.json";
  p.reports = root / "reports";
  p.stage = root / "state" / "stage.json";
  p.lock = root / ".polemos.lock";
  return p;
}

}  // namespace

std::vector<fs::path> WorkspacePaths::all() const {
  return {raw_store,   video_list, ingest_report, clean_store, clean_report,       sample,  annotations, training_set,
          balance_report, model,   metrics,       predictions, prediction_summary, reports, stage,       lock};
}

void PipelineConfig::validate() const {
  for (const SearchQuery& q : queries) q.validate();
  train.validate();
  if (accuracy_gate <= Rational(0) || accuracy_gate > Rational(1))
    throw ConfigError("accuracy_gate must be in (0, 1]");
  if (quota.units_total < 0 || quota.cost_per_search <= 0 || quota.cost_per_thread_page <= 0)
    throw ConfigError("quota costs must be positive and the total non-negative");
  if (annotation.quota.per_label_target < 0 || annotation.quota.total_target < 0)
    throw ConfigError("annotation quota targets must be non-negative");
  if (annotation.max_per_video_fraction <= 0 || annotation.max_per_video_fraction > 1)
    throw ConfigError("max_per_video_fraction must be in (0, 1]");
  if (api.concurrency < 1) throw ConfigError("api.concurrency must be at least 1");
  if (inference.mode == InferenceConfig::Mode::kRemote && inference.remote.endpoint.empty())
    throw ConfigError("inference.endpoint is required in remote mode");
  for (const int c : analysis.exclude)
    if (!is_valid_code(c)) throw ConfigError("analysis.exclude holds an invalid code");

  std::vector<fs::path> all = paths.all();
  for (fs::path& p : all) p = p.lexically_normal();
  std::sort(all.begin(), all.end());
  if (auto dup = std::adjacent_find(all.begin(), all.end()); dup != all.end())
    throw ConfigError("two artifacts share the path " + dup->string());
}

PipelineConfig default_config(const fs::path& workdir) {
  PipelineConfig c;
  c.paths = default_paths(workdir);
  return c;
}

PipelineConfig config_from_json(const json& j, const fs::path& base_dir) {
  try {
    allow_keys(j, "config", {"workdir", "window", "queries", "quota", "api", "annotation", "train", "accuracy_gate",
                             "inference", "analysis", "paths"});
    const fs::path root = j.contains("workdir") ? resolve(base_dir, j.at("workdir")) : base_dir;
    PipelineConfig c = default_config(root);

    if (j.contains("window")) {
      const json& w = j.at("window");
      allow_keys(w, "window", {"start", "end"});
      c.window = StudyWindow(read_time(w.at("start")), read_time(w.at("end")));
    }

    if (j.contains("queries")) {
      for (const json& q : j.at("queries")) {
        allow_keys(q, "queries[]", {"term", "published_after", "published_before", "max_videos"});
        SearchQuery sq;
        sq.term = q.at("term").get<std::string>();
        sq.published_after = q.contains("published_after") ? read_time(q.at("published_after")) : c.window.start;
        sq.published_before = q.contains("published_before") ? read_time(q.at("published_before")) : c.window.end;
        read(q, "max_videos", sq.max_videos);
        c.queries.push_back(std::move(sq));
      }
    }

    if (j.contains("quota")) {
      const json& q = j.at("quota");
      allow_keys(q, "quota", {"units_total", "cost_per_search", "cost_per_thread_page"});
      read(q, "units_total", c.quota.units_total);
      read(q, "cost_per_search", c.quota.cost_per_search);
      read(q, "cost_per_thread_page", c.quota.cost_per_thread_page);
    }

    if (j.contains("api")) {
      const json& a = j.at("api");
      allow_keys(a, "api", {"base_url", "timeout_ms", "max_retries", "backoff_ms", "concurrency", "include_replies",
                            "allowlist"});
      read(a, "base_url", c.api.base_url);
      if (a.contains("timeout_ms")) c.api.timeout = std::chrono::milliseconds(a.at("timeout_ms").get<std::int64_t>());
      read(a, "max_retries", c.api.max_retries);
      if (a.contains("backoff_ms"))
        c.api.backoff_base = std::chrono::milliseconds(a.at("backoff_ms").get<std::int64_t>());
      read(a, "concurrency", c.api.concurrency);
      read(a, "include_replies", c.api.include_replies);
      if (a.contains("allowlist")) c.api.allowlist = resolve(base_dir, a.at("allowlist"));
    }

    if (j.contains("annotation")) {
      const json& a = j.at("annotation");
      allow_keys(a, "annotation", {"per_label_target", "total_target", "sample_size", "max_per_video_fraction",
                                   "lease_seconds", "host", "port", "static_dir", "export_cap_per_label"});
      if (a.contains("per_label_target"))
        c.annotation.quota = QuotaTarget::uniform(a.at("per_label_target").get<int>());
      read(a, "total_target", c.annotation.quota.total_target);
      read(a, "sample_size", c.annotation.sample_size);
      read(a, "max_per_video_fraction", c.annotation.max_per_video_fraction);
      if (a.contains("lease_seconds")) c.annotation.lease = std::chrono::seconds(a.at("lease_seconds").get<std::int64_t>());
      read(a, "host", c.annotation.host);
      read(a, "port", c.annotation.port);
      if (a.contains("static_dir")) c.annotation.static_dir = resolve(base_dir, a.at("static_dir"));
      if (a.contains("export_cap_per_label")) c.annotation.export_cap_per_label = a.at("export_cap_per_label").get<int>();
    }

    if (j.contains("train")) {
      const json& t = j.at("train");
      allow_keys(t, "train", {"epochs", "learning_rate", "l2", "seed", "holdout_fraction", "dim_bits", "salt"});
      read(t, "epochs", c.train.epochs);
      read(t, "learning_rate", c.train.learning_rate);
      read(t, "l2", c.train.l2);
      read(t, "seed", c.train.seed);
      read(t, "holdout_fraction", c.train.holdout_fraction);
      read(t, "dim_bits", c.train.dim_bits);
      read(t, "salt", c.train.salt);
    }

    if (j.contains("accuracy_gate")) c.accuracy_gate = read_rational(j.at("accuracy_gate"));

    if (j.contains("inference")) {
      const json& i = j.at("inference");
      allow_keys(i, "inference", {"mode", "endpoint", "timeout_ms", "batch_size", "send_encoded", "sequence_length"});
      const std::string mode = i.value("mode", std::string("reference"));
      if (mode == "reference") c.inference.mode = InferenceConfig::Mode::kReference;
      else if (mode == "remote") c.inference.mode = InferenceConfig::Mode::kRemote;
      else throw ConfigError("inference.mode must be 'reference' or 'remote'");
      read(i, "endpoint", c.inference.remote.endpoint);
      if (i.contains("timeout_ms"))
        c.inference.remote.timeout = std::chrono::milliseconds(i.at("timeout_ms").get<std::int64_t>());
      read(i, "batch_size", c.inference.remote.batch_size);
      read(i, "send_encoded", c.inference.remote.send_encoded);
      read(i, "sequence_length", c.inference.remote.sequence_length);
    }

    if (j.contains("analysis")) {
      const json& a = j.at("analysis");
      allow_keys(a, "analysis", {"anchor", "january_start", "exclude"});
      if (a.contains("anchor")) c.analysis.anchor = read_time(a.at("anchor"));
      if (a.contains("january_start")) c.analysis.january_start = read_time(a.at("january_start"));
      if (a.contains("exclude")) c.analysis.exclude = a.at("exclude").get<std::set<int>>();
    }

    if (j.contains("paths")) {
      const json& p = j.at("paths");
      allow_keys(p, "paths", {"raw_store", "video_list", "ingest_report", "clean_store", "clean_report", "sample",
                              "annotations", "training_set", "balance_report", "model", "metrics", "predictions",
                              "prediction_summary", "reports", "stage", "lock"});
      WorkspacePaths& w = c.paths;
      const std::pair<const char*, fs::path*> slots[] = {
          {"raw_store", &w.raw_store},     {"video_list", &w.video_list},
          {"ingest_report", &w.ingest_report}, {"clean_store", &w.clean_store},
          {"clean_report", &w.clean_report}, {"sample", &w.sample},
          {"annotations", &w.annotations}, {"training_set", &w.training_set},
          {"balance_report", &w.balance_report}, {"model", &w.model},
          {"metrics", &w.metrics},         {"predictions", &w.predictions},
          {"prediction_summary", &w.prediction_summary}, {"reports", &w.reports},
          {"stage", &w.stage},             {"lock", &w.lock},
      };
      for (const auto& [key, slot] : slots)
        if (p.contains(key)) *slot = resolve(root, p.at(key));
    }

    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const ParseError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

PipelineConfig load_config(const fs::path& file) {
  json j;
  try {
    j = json::parse(read_file(file));
  } catch (const json::parse_error& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
  const fs::path base = fs::absolute(file).parent_path();
  return config_from_json(j, base);
}

}  // namespace polemos
