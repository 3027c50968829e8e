#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "polemos/annotation/sampling.hpp"
#include "polemos/annotation/schema.hpp"
#include "polemos/annotation/server.hpp"
#include "polemos/annotation/session.hpp"
#include "polemos/annotation/stage.hpp"
#include "polemos/core/fileio.hpp"
#include "support.hpp"

using namespace polemos;
using nlohmann::json;
using testing::make_comment;

namespace {

std::vector<Comment> small_sample(int n) {
  std::vector<Comment> out;
  for (int i = 0; i < n; ++i)
    out.push_back(make_comment("s" + std::to_string(i), "texto numero " + std::to_string(i),
                               make_timestamp(2023, 11, 1), i, "v" + std::to_string(i % 3)));
  return out;
}

SessionOptions options_with(testing::ManualClock& clock, int per_label = 2) {
  SessionOptions o;
  o.quota = QuotaTarget::uniform(per_label);
  o.clock = clock.fn();
  return o;
}

}  // namespace

TEST_CASE("label schema is fixed") {
  const auto& s = label_schema();
  CHECK(s.size() == 7);
  CHECK(s[0].name == "ANTI_HAMAS");
  CHECK(s[3].name == "SIN_POSTURA");
  CHECK(s[6].name == "PRO_PALESTINO");
  for (int c = 0; c < kNumLabels; ++c) {
    CHECK(s[static_cast<std::size_t>(c)].code == c);
    CHECK(code_from_name(label_name(c)) == c);
    CHECK_FALSE(s[static_cast<std::size_t>(c)].rubric.empty());
  }
  CHECK_FALSE(code_from_name("PRO_HAMAS").has_value());
  CHECK_FALSE(is_valid_code(7));
  CHECK_FALSE(is_valid_code(-1));
}

TEST_CASE("sampling is deterministic and without replacement") {
  std::vector<Comment> corpus;
  for (int i = 0; i < 500; ++i)
    corpus.push_back(make_comment("c" + std::to_string(i), "x y", make_timestamp(2023, 11, 1), 0,
                                  "v" + std::to_string(i % 20)));
  const SampleResult a = sample_for_annotation(corpus, 100, 11);
  const SampleResult b = sample_for_annotation(corpus, 100, 11);
  CHECK(a.comment_ids == b.comment_ids);
  std::set<std::string> unique(a.comment_ids.begin(), a.comment_ids.end());
  CHECK(unique.size() == 100);
  CHECK(sample_for_annotation(corpus, 100, 12).comment_ids != a.comment_ids);

  // Input order does not matter.
  std::vector<Comment> reversed(corpus.rbegin(), corpus.rend());
  CHECK(sample_for_annotation(reversed, 100, 11).comment_ids == a.comment_ids);

  CHECK_THROWS_AS(sample_for_annotation(corpus, 501, 1), InsufficientCorpus);
  CHECK_THROWS_AS(sample_for_annotation(std::vector<Comment>{}, 0, 1), InsufficientCorpus);
  CHECK(sample_for_annotation(corpus, 500, 3).comment_ids.size() == 500);
}

TEST_CASE("sampling warns when one video dominates") {
  std::vector<Comment> corpus;
  for (int i = 0; i < 50; ++i)
    corpus.push_back(make_comment("c" + std::to_string(i), "x y", make_timestamp(2023, 11, 1), 0, i < 40 ? "big" : "v"));
  const SampleResult r = sample_for_annotation(corpus, 50, 1, 0.5);
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0].find("big") != std::string::npos);
}

TEST_CASE("stage transitions") {
  PipelineState s;
  CHECK(s.current() == Stage::kModel);
  CHECK_THROWS_AS(s.advance(Stage::kAnnotate, {}), IllegalTransition);
  s.advance(Stage::kProcure, {});
  s.advance(Stage::kAnnotate, {});
  s.advance(Stage::kTrainTest, {});
  s.advance(Stage::kEvaluate, {});
  s.advance(Stage::kRevise, {});
  s.advance(Stage::kAnnotate, {}, "second round");
  s.advance(Stage::kTrainTest, {});
  s.advance(Stage::kEvaluate, {});
  s.advance(Stage::kDistribute, {});
  CHECK_THROWS_AS(s.advance(Stage::kRevise, {}), IllegalTransition);
  CHECK(s.history().size() == 10);

  const PipelineState back = PipelineState::from_json(s.to_json());
  CHECK(back.current() == Stage::kDistribute);
  CHECK(back.history().size() == 10);
  CHECK(back.history()[6].note == "second round");

  for (Stage st : {Stage::kModel, Stage::kProcure, Stage::kAnnotate, Stage::kTrainTest, Stage::kEvaluate,
                   Stage::kRevise, Stage::kDistribute})
    CHECK(stage_from_string(to_string(st)) == st);
}

TEST_CASE("stage history replay rejects illegal sequences") {
  json j = PipelineState().to_json();
  j["history"].push_back({{"stage", "EVALUATE"}, {"entered_at", "2024-01-01T00:00:00Z"}, {"note", ""}});
  CHECK_THROWS_AS(PipelineState::from_json(j), ParseError);
}

TEST_CASE("stage state persists") {
  testing::TempDir dir("stage");
  PipelineState s(make_timestamp(2024, 1, 1));
  s.advance(Stage::kProcure, make_timestamp(2024, 1, 2), "ingest");
  s.save(dir / "stage.json");
  const PipelineState back = PipelineState::load(dir / "stage.json");
  CHECK(back.current() == Stage::kProcure);
  CHECK(back.history()[1].entered_at == make_timestamp(2024, 1, 2));
}

TEST_CASE("session hands out tasks in sample order and tracks quotas") {
  testing::ManualClock clock;
  AnnotationSession session(small_sample(5), options_with(clock));
  auto t = session.next_task("ana");
  REQUIRE(t);
  CHECK(t->comment.comment_id == "s0");
  CHECK(t->lease_expires == clock.now + std::chrono::minutes(10));
  // Asking again returns the held task.
  CHECK(session.next_task("ana")->comment.comment_id == "s0");

  QuotaProgress p = session.record_label("s0", 6, "ana");
  CHECK(p.counts[6] == 1);
  CHECK(p.total == 1);
  CHECK(p.total_target == 14);
  CHECK_FALSE(p.all_met());
  CHECK(session.next_task("ana")->comment.comment_id == "s1");
}

TEST_CASE("two annotators never receive the same leased comment") {
  testing::ManualClock clock;
  AnnotationSession session(small_sample(3), options_with(clock));
  const auto a = session.next_task("ana");
  const auto b = session.next_task("beto");
  REQUIRE(a);
  REQUIRE(b);
  CHECK(a->comment.comment_id != b->comment.comment_id);

  // Expired leases are reassigned.
  clock.now += std::chrono::minutes(11);
  const auto c = session.next_task("carla");
  REQUIRE(c);
  CHECK(c->comment.comment_id == "s0");
  // ana's lease on s0 expired; ana is offered the next free comment instead.
  const auto a2 = session.next_task("ana");
  REQUIRE(a2);
  CHECK(a2->comment.comment_id == "s1");
}

TEST_CASE("labeled comments leave the queue for everyone") {
  testing::ManualClock clock;
  AnnotationSession session(small_sample(2), options_with(clock));
  session.next_task("ana");
  session.record_label("s0", 1, "ana");
  CHECK(session.next_task("beto")->comment.comment_id == "s1");
  session.record_label("s1", 2, "beto");
  CHECK_FALSE(session.next_task("carla").has_value());
}

TEST_CASE("skip is per annotator and releases the lease") {
  testing::ManualClock clock;
  AnnotationSession session(small_sample(2), options_with(clock));
  CHECK(session.next_task("ana")->comment.comment_id == "s0");
  session.skip("s0", "ana");
  CHECK(session.next_task("ana")->comment.comment_id == "s1");
  CHECK(session.next_task("beto")->comment.comment_id == "s0");
  CHECK_THROWS_AS(session.skip("zz", "ana"), NotInSample);
}

TEST_CASE("invalid labels and foreign comments are rejected") {
  testing::ManualClock clock;
  AnnotationSession session(small_sample(2), options_with(clock));
  CHECK_THROWS_AS(session.record_label("s0", 7, "ana"), InvalidLabel);
  CHECK_THROWS_AS(session.record_label("s0", -1, "ana"), InvalidLabel);
  CHECK_THROWS_AS(session.record_label("nope", 1, "ana"), NotInSample);
  CHECK_THROWS_AS(session.record_label("s0", 1, ""), InvalidArgument);
  CHECK(session.progress().total == 0);
  CHECK(session.audit_trail().empty());
}

TEST_CASE("relabel keeps one active record and undo restores the previous one") {
  testing::ManualClock clock;
  AnnotationSession session(small_sample(3), options_with(clock));
  session.record_label("s0", 1, "ana");
  session.record_label("s0", 5, "ana");
  CHECK(session.progress().total == 1);
  CHECK(session.progress().counts[5] == 1);

  const auto undone = session.undo_last("ana");
  REQUIRE(undone);
  CHECK(undone->code == 5);
  CHECK(session.progress().counts[1] == 1);
  CHECK(session.progress().counts[5] == 0);
  session.undo_last("ana");
  CHECK(session.progress().total == 0);
  CHECK_FALSE(session.undo_last("ana").has_value());

  // Undo is scoped to the annotator.
  session.record_label("s1", 2, "beto");
  CHECK_FALSE(session.undo_last("ana").has_value());
  CHECK(session.progress().total == 1);

  const auto trail = session.audit_trail();
  CHECK(trail.size() == 5);
  CHECK(trail[2].kind == AuditEvent::Kind::kUndo);
}

TEST_CASE("audit log replays into an equivalent session") {
  testing::TempDir dir("audit");
  testing::ManualClock clock;
  SessionOptions o = options_with(clock);
  o.log_path = dir / "records.jsonl";
  {
    AnnotationSession s(small_sample(4), o);
    s.record_label("s0", 0, "ana");
    s.record_label("s1", 3, "ana");
    s.record_label("s2", 4, "beto");
    s.undo_last("ana");
    s.record_label("s3", 6, "ana");
  }
  AnnotationSession replayed(small_sample(4), o);
  const auto recs = replayed.active_records();
  REQUIRE(recs.size() == 3);
  CHECK(recs[0].comment_id == "s0");
  CHECK(recs[1].comment_id == "s2");
  CHECK(recs[1].annotator == "beto");
  CHECK(recs[2].code == 6);
  CHECK(replayed.audit_trail().size() == 5);
  // Undo history survives the restart.
  CHECK(replayed.undo_last("ana")->comment_id == "s3");

  // A log naming comments outside the sample is refused.
  CHECK_THROWS_AS(AnnotationSession(small_sample(1), o), ParseError);
}

TEST_CASE("export is deterministic, capped and reports balance") {
  testing::ManualClock clock;
  AnnotationSession session(small_sample(6), options_with(clock, 2));
  session.record_label("s3", 1, "ana");
  session.record_label("s0", 1, "ana");
  session.record_label("s1", 1, "beto");
  session.record_label("s2", 4, "ana");
  const TrainingExport all = session.export_training_set();
  REQUIRE(all.rows.size() == 4);
  CHECK(all.rows[0].text == "texto numero 0");
  CHECK(all.rows[3].text == "texto numero 3");
  CHECK(all.balance.counts[1] == 3);
  CHECK(all.balance.undersupplied == std::vector<int>{0, 2, 3, 4, 5, 6});
  CHECK_FALSE(all.balance.balanced());

  const TrainingExport capped = session.export_training_set(2);
  CHECK(capped.rows.size() == 3);
  CHECK(capped.balance.counts[1] == 2);

  CHECK(training_csv(all) ==
        "text,code\ntexto numero 0,1\ntexto numero 1,1\ntexto numero 2,4\ntexto numero 3,1\n");

  testing::TempDir dir("export");
  write_file_atomic(dir / "training.csv", training_csv(all));
  CHECK(read_training_csv(dir / "training.csv") == all.rows);
  write_file_atomic(dir / "bad.csv", "text,code\nhola,9\n");
  CHECK_THROWS_AS(read_training_csv(dir / "bad.csv"), ParseError);
}

TEST_CASE("revise round serves undersupplied hints first") {
  testing::ManualClock clock;
  AnnotationSession session(small_sample(5), options_with(clock, 1));
  session.record_label("s0", 2, "ana");
  session.set_stage(Stage::kRevise);
  session.set_hints({{"s1", 2}, {"s2", 2}, {"s3", 0}, {"s4", 6}});
  // Label 2 already met its target; s3 (hint 0) comes before s1 and s2.
  CHECK(session.next_task("ana")->comment.comment_id == "s3");
  session.record_label("s3", 0, "ana");
  CHECK(session.next_task("ana")->comment.comment_id == "s4");
}

TEST_CASE("concurrent labelers keep counts consistent") {
  AnnotationSession session(small_sample(400), SessionOptions{QuotaTarget::uniform(50), std::chrono::minutes(10), {}, {}});
  std::vector<std::thread> workers;
  std::atomic<int> labeled{0};
  for (int w = 0; w < 4; ++w) {
    workers.emplace_back([&, w] {
      const std::string who = "w" + std::to_string(w);
      while (auto t = session.next_task(who)) {
        session.record_label(t->comment.comment_id, w, who);
        ++labeled;
      }
    });
  }
  for (auto& t : workers) t.join();
  CHECK(labeled.load() == 400);
  CHECK(session.progress().total == 400);
  CHECK(session.active_records().size() == 400);
}

TEST_CASE("http api") {
  testing::ManualClock clock;
  std::vector<VideoRef> videos{{"v0", "Título cero", "Canal", "q", make_timestamp(2023, 10, 9)}};
  AnnotationSession session(small_sample(3), options_with(clock, 1), videos);
  AnnotationServer server(session, ServerOptions{});
  const int port = server.start();
  httplib::Client cli("127.0.0.1", port);

  SUBCASE("next requires an annotator") { CHECK(cli.Get("/api/next")->status == 400); }

  SUBCASE("label flow") {
    auto next = cli.Get("/api/next?annotator=ana");
    REQUIRE(next);
    CHECK(next->status == 200);
    const json task = json::parse(next->body);
    CHECK(task.at("comment_id") == "s0");
    CHECK(task.at("video_title") == "Título cero");
    CHECK(task.contains("lease_expires"));

    auto bad = cli.Post("/api/label", json{{"comment_id", "s0"}, {"code", 9}, {"annotator", "ana"}}.dump(),
                        "application/json");
    CHECK(bad->status == 422);
    auto missing = cli.Post("/api/label", json{{"comment_id", "zz"}, {"code", 1}, {"annotator", "ana"}}.dump(),
                            "application/json");
    CHECK(missing->status == 404);
    CHECK(cli.Post("/api/label", "not json", "application/json")->status == 400);

    auto ok = cli.Post("/api/label", json{{"comment_id", "s0"}, {"code", 5}, {"annotator", "ana"}}.dump(),
                       "application/json");
    REQUIRE(ok->status == 200);
    CHECK(json::parse(ok->body).at("labels")[5].at("count") == 1);

    auto progress = cli.Get("/api/progress");
    CHECK(json::parse(progress->body).at("total") == 1);

    auto exported = cli.Get("/api/export");
    CHECK(exported->status == 200);
    CHECK(exported->body == "text,code\ntexto numero 0,5\n");

    auto undo = cli.Post("/api/undo", json{{"annotator", "ana"}}.dump(), "application/json");
    CHECK(undo->status == 200);
    CHECK(json::parse(undo->body).at("undone").at("comment_id") == "s0");
    CHECK(cli.Post("/api/undo", json{{"annotator", "ana"}}.dump(), "application/json")->status == 204);
  }

  SUBCASE("skip and exhaustion") {
    CHECK(cli.Post("/api/skip", json{{"comment_id", "s0"}, {"annotator", "ana"}}.dump(), "application/json")->status ==
          204);
    CHECK(json::parse(cli.Get("/api/next?annotator=ana")->body).at("comment_id") == "s1");
    for (const char* id : {"s0", "s1", "s2"})
      cli.Post("/api/label", json{{"comment_id", id}, {"code", 3}, {"annotator", "beto"}}.dump(), "application/json");
    CHECK(cli.Get("/api/next?annotator=ana")->status == 204);
  }

  SUBCASE("schema") {
    const json s = json::parse(cli.Get("/api/schema")->body);
    REQUIRE(s.at("labels").size() == 7);
    CHECK(s.at("labels")[0].at("name") == "ANTI_HAMAS");
    CHECK(s.at("labels")[4].at("code") == 4);
  }
  server.stop();
}
