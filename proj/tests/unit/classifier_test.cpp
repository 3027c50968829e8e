#include <cmath>

#include "doctest.h"
#include "json.hpp"
#include "polemos/classifier/encode.hpp"
#include "polemos/classifier/kernels.hpp"
#include "polemos/classifier/metrics.hpp"
#include "polemos/classifier/model.hpp"
#include "polemos/classifier/predict.hpp"
#include "polemos/classifier/remote.hpp"
#include "polemos/classifier/tokenizer.hpp"
#include "polemos/classifier/train.hpp"
#include "polemos/core/fileio.hpp"
#include "polemos/core/rng.hpp"
#include "polemos/fixtures/inference_server.hpp"
#include "polemos/fixtures/synth.hpp"
#include "support.hpp"

using namespace polemos;

namespace {

std::vector<LabeledText> lexicon_data(std::size_t per_label, std::uint64_t seed) {
  const auto& vocab = fixtures::label_vocabulary();
  Rng rng(seed);
  std::vector<LabeledText> out;
  for (int code = 0; code < kNumLabels; ++code) {
    const auto& words = vocab[static_cast<std::size_t>(code)];
    for (std::size_t i = 0; i < per_label; ++i) {
      std::string text;
      for (int w = 0; w < 4; ++w) text += words[rng.below(words.size())] + " ";
      text += "y luego dijo algo";
      out.push_back({text, code});
    }
  }
  return out;
}

std::vector<const kernels::KernelTable*> available_kernels() {
  std::vector<const kernels::KernelTable*> out{&kernels::scalar_kernels()};
  if (auto* k = kernels::avx2_kernels()) out.push_back(k);
  if (auto* k = kernels::neon_kernels()) out.push_back(k);
  return out;
}

}  // namespace

TEST_CASE("tokenizer lowercases words and keeps emoji") {
  const TokenSequence t = tokenize("¡Libertad para PALESTINA! 🇵🇸 #FreeGaza 2023");
  CHECK(t == TokenSequence{"libertad", "para", "palestina", "🇵🇸", "freegaza", "2023"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("... ,,, !!").empty());
  CHECK(tokenize("Israel").at(0) == "israel");
  CHECK(tokenize("ISRAEL") == tokenize("israel"));
}

TEST_CASE("features are normalized, sorted and stable") {
  const Featurizer f(kDefaultSalt, 18);
  const FeatureVector a = f(tokenize("fuera hamas fuera hamas"));
  CHECK(std::abs(a.norm() - 1.0) < 1e-12);
  CHECK(std::is_sorted(a.indices.begin(), a.indices.end()));
  for (auto i : a.indices) CHECK(i < f.dim());
  CHECK(f(tokenize("fuera hamas fuera hamas")).indices == a.indices);
  CHECK(Featurizer(1, 18)(tokenize("fuera hamas")).indices != Featurizer(2, 18)(tokenize("fuera hamas")).indices);
  CHECK(f(TokenSequence{}).empty());
  CHECK(stable_hash("abc", 1) == stable_hash("abc", 1));
  CHECK(stable_hash("abc", 1) != stable_hash("abd", 1));
}

TEST_CASE("encoder pads and truncates") {
  const HashedTokenIds ids(kDefaultSalt, 100);
  const EncodedInput e = encode(TokenSequence{"a", "b", "c"}, 5, ids);
  CHECK(e.input_mask == std::vector<std::int32_t>{1, 1, 1, 0, 0});
  CHECK(e.input_word_ids[3] == 0);
  for (int i = 0; i < 3; ++i) CHECK(e.input_word_ids[i] >= 1);
  CHECK(e.input_type_ids == std::vector<std::int32_t>(5, 0));
  CHECK(encode(TokenSequence{"a", "b", "c"}, 2, ids).input_mask == std::vector<std::int32_t>{1, 1});
  CHECK_THROWS_AS(encode(TokenSequence{"a"}, 0, ids), InvalidArgument);

  const Vocabulary v(std::vector<std::string>{"[PAD]", "[UNK]", "hola"});
  CHECK(v.id("hola") == 2);
  CHECK(v.id("nada") == 1);
}

TEST_CASE("softmax and argmax") {
  const ClassScores p = softmax({1000, 1000, 0, 0, 0, 0, 0});
  CHECK(std::abs(p[0] - 0.5) < 1e-12);
  double sum = 0;
  for (double x : softmax({1, 2, 3, 4, 5, 6, 7})) sum += x;
  CHECK(std::abs(sum - 1.0) < 1e-12);
  CHECK(argmax({0, 2, 2, 1, 0, 0, 0}) == 1);
}

TEST_CASE("kernel variants agree bit for bit") {
  Rng rng(3);
  const std::size_t dim = 1024;
  std::vector<double> rows(dim * kernels::kLanes);
  for (double& r : rows) r = rng.unit() * 2 - 1;
  for (std::size_t nnz : {0u, 1u, 3u, 17u, 64u}) {
    std::vector<std::uint32_t> idx(nnz);
    std::vector<double> val(nnz);
    for (std::size_t i = 0; i < nnz; ++i) {
      idx[i] = static_cast<std::uint32_t>(rng.below(dim));
      val[i] = rng.unit();
    }
    std::vector<std::array<double, kernels::kLanes>> acc;
    std::vector<std::vector<double>> after;
    for (const auto* k : available_kernels()) {
      alignas(64) double out[kernels::kLanes] = {};
      k->gather_accumulate(rows.data(), idx.data(), val.data(), nnz, out);
      acc.push_back(std::to_array(out));
      std::vector<double> copy = rows;
      alignas(64) double coeff[kernels::kLanes] = {0.5, -0.25, 1e-3, 2, -7, 0.1, 3, 0};
      k->scatter_axpy(copy.data(), idx.data(), val.data(), nnz, coeff);
      k->scale(copy.data(), copy.size(), 0.999);
      after.push_back(std::move(copy));
    }
    for (std::size_t i = 1; i < acc.size(); ++i) {
      CHECK(std::memcmp(acc[0].data(), acc[i].data(), sizeof(double) * kernels::kLanes) == 0);
      CHECK(std::memcmp(after[0].data(), after[i].data(), sizeof(double) * after[0].size()) == 0);
    }
  }
}

TEST_CASE("training with each kernel gives the same model") {
  const auto data = lexicon_data(20, 1);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.dim_bits = 12;
  std::optional<Model> first;
  for (const auto* k : available_kernels()) {
    const TrainResult r = train(data, cfg, *k);
    if (!first) first = r.model;
    else CHECK(r.model == *first);
  }
}

TEST_CASE("analytic gradient matches finite differences") {
  Model m(5, 4);
  Rng rng(17);
  for (double& w : m.rows()) w = rng.unit() - 0.5;
  for (double& b : m.bias()) b = rng.unit() - 0.5;
  std::vector<Example> ex;
  const char* texts[] = {"uno dos tres", "cuatro cinco", "seis siete ocho nueve", "diez", "once doce trece"};
  for (int i = 0; i < 5; ++i) ex.push_back({m.featurizer()(tokenize(texts[i])), i % kNumLabels});
  const double l2 = 1e-3;
  const Gradient g = objective_gradient(m, ex, l2);
  const double h = 1e-5;
  double worst = 0;
  for (std::uint32_t f = 0; f < m.dim(); ++f) {
    for (int c = 0; c < kNumLabels; ++c) {
      const double w = m.weight(c, f);
      m.set_weight(c, f, w + h);
      const double up = objective(m, ex, l2);
      m.set_weight(c, f, w - h);
      const double down = objective(m, ex, l2);
      m.set_weight(c, f, w);
      const double numeric = (up - down) / (2 * h);
      const double analytic = g.weights[f * kernels::kLanes + static_cast<std::size_t>(c)];
      const double denom = std::max(std::abs(numeric), std::abs(analytic));
      if (denom > 1e-8) worst = std::max(worst, std::abs(numeric - analytic) / denom);
    }
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("holdout split is stratified and reproducible") {
  const auto data = lexicon_data(10, 2);
  const Split a = split_holdout(data, 0.2, 5);
  const Split b = split_holdout(data, 0.2, 5);
  CHECK(a.holdout == b.holdout);
  CHECK(a.holdout.size() == 14);
  CHECK(a.train.size() == 56);
  LabelCounts counts{};
  for (const auto& r : a.holdout) ++counts[static_cast<std::size_t>(r.code)];
  for (auto c : counts) CHECK(c == 2);
}

TEST_CASE("training learns separable lexicons and round trips") {
  const auto data = lexicon_data(60, 3);
  TrainConfig cfg;
  const TrainResult r = train(data, cfg);
  CHECK(r.model.history().size() == 15);
  CHECK(r.model.history().back().loss < r.model.history().front().loss);
  const Metrics m = evaluate(r.model, r.holdout);
  CHECK(m.accuracy >= 0.9);
  CHECK(r.warnings.empty());

  testing::TempDir dir("model");
  r.model.save(dir / "model.json");
  const Model back = Model::load(dir / "model.json");
  CHECK(back == r.model);
  CHECK(read_file(dir / "model.json") == (r.model.save(dir / "again.json"), read_file(dir / "again.json")));
  for (const auto& row : r.holdout) CHECK(back.predict(row.text).code == r.model.predict(row.text).code);
}

TEST_CASE("missing labels produce a warning") {
  auto data = lexicon_data(10, 4);
  std::erase_if(data, [](const LabeledText& t) { return t.code == 3; });
  TrainConfig cfg;
  cfg.epochs = 1;
  const TrainResult r = train(data, cfg);
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0].find("SIN_POSTURA") != std::string::npos);
}

TEST_CASE("train config validation") {
  TrainConfig c;
  c.epochs = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = {};
  c.learning_rate = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = {};
  c.holdout_fraction = 1.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  CHECK_THROWS_AS(train(std::vector<LabeledText>{}, TrainConfig{}), InvalidArgument);
}

TEST_CASE("model loading rejects damaged files") {
  nlohmann::json j = Model(1, 4).to_json();
  j["format"] = "other";
  CHECK_THROWS_AS(Model::from_json(j), ParseError);
  j = Model(1, 4).to_json();
  j["bias"] = {1, 2};
  CHECK_THROWS_AS(Model::from_json(j), ParseError);
}

TEST_CASE("evaluate counts a confusion matrix") {
  const std::vector<int> truth{0, 0, 1, 1, 2, 2};
  const std::vector<int> pred{0, 1, 1, 1, 2, 0};
  const Metrics m = evaluate(truth, pred);
  CHECK(m.total == 6);
  CHECK(m.correct == 4);
  CHECK(m.confusion[0][1] == 1);
  CHECK(m.confusion[2][0] == 1);
  CHECK(std::abs(m.precision[1] - 2.0 / 3.0) < 1e-12);
  CHECK(std::abs(m.recall[0] - 0.5) < 1e-12);
  CHECK(m.f1[6] == 0.0);
  CHECK_THROWS_AS(evaluate(std::vector<int>{0}, std::vector<int>{}), InvalidArgument);
  CHECK_THROWS_AS(evaluate(std::vector<int>{0}, std::vector<int>{8}), InvalidArgument);
}

TEST_CASE("class collapse detection") {
  LabelCounts pred{0, 5, 5, 5, 5, 5, 0};
  const auto w = detect_class_collapse(pred);
  REQUIRE(w.size() == 2);
  CHECK(w[0].code == 0);
  CHECK(w[1].code == 6);
  LabelCounts training{10, 10, 10, 10, 10, 10, 0};
  const auto w2 = detect_class_collapse(pred, training);
  REQUIRE(w2.size() == 1);
  CHECK(w2[0].code == 0);
  CHECK(detect_class_collapse(LabelCounts{1, 1, 1, 1, 1, 1, 1}).empty());
}

TEST_CASE("corpus prediction writes a csv") {
  const TrainResult r = train(lexicon_data(20, 5), TrainConfig{.epochs = 2, .dim_bits = 12});
  ReferencePredictor p(r.model);
  std::vector<Comment> corpus;
  for (int i = 0; i < 7; ++i)
    corpus.push_back(testing::make_comment("c" + std::to_string(i), fixtures::label_vocabulary()[i][0] + " x",
                                           make_timestamp(2023, 11, 1)));
  testing::TempDir dir("pred");
  const PredictionSummary s = predict_corpus(p, corpus, dir / "p.csv", 3);
  CHECK(s.rows == 7);
  const auto rows = read_predictions(dir / "p.csv");
  REQUIRE(rows.size() == 7);
  CHECK(rows[4].comment_id == "c4");
  std::int64_t total = 0;
  for (auto c : s.counts) total += c;
  CHECK(total == 7);
}

TEST_CASE("remote inference protocol") {
  const TrainResult r = train(lexicon_data(20, 6), TrainConfig{.epochs = 2, .dim_bits = 12});
  const std::vector<std::string> texts{"uno", "dos tres", "cuatro", "cinco", "seis"};

  SUBCASE("matches the local model in batches") {
    fixtures::InferenceServer server(r.model);
    server.start();
    RemoteOptions o{.endpoint = server.endpoint(), .batch_size = 2};
    const auto remote = remote_predict(o, texts);
    ReferencePredictor local(r.model);
    const auto expected = local.predict_batch(texts);
    REQUIRE(remote.size() == expected.size());
    for (std::size_t i = 0; i < remote.size(); ++i) CHECK(remote[i].code == expected[i].code);
    CHECK(server.requests() == 3);
  }

  SUBCASE("encoded payload") {
    fixtures::InferenceServer server(r.model);
    server.start();
    RemoteOptions o{.endpoint = server.endpoint(), .send_encoded = true, .sequence_length = 8};
    remote_predict(o, texts);
    const auto body = nlohmann::json::parse(server.last_request());
    CHECK(body.at("inputs").at("input_word_ids").size() == 5);
    CHECK(body.at("inputs").at("input_mask")[1] == std::vector<int>{1, 1, 0, 0, 0, 0, 0, 0});
  }

  SUBCASE("timeout") {
    fixtures::InferenceServer server(r.model, {.delay = std::chrono::milliseconds(700)});
    server.start();
    RemoteOptions o{.endpoint = server.endpoint(), .timeout = std::chrono::milliseconds(200)};
    CHECK_THROWS_AS(remote_predict(o, texts), RemoteTimeout);
  }

  SUBCASE("http failure") {
    fixtures::InferenceServer server(r.model, {.status = 503});
    server.start();
    try {
      remote_predict(RemoteOptions{.endpoint = server.endpoint()}, texts);
      FAIL("expected RemoteFailure");
    } catch (const RemoteFailure& e) {
      CHECK(e.status() == 503);
    }
  }

  SUBCASE("malformed responses") {
    fixtures::InferenceServer server(r.model, {.tamper = [](const std::string&) {
                                                 return std::string(R"({"results":[{"code":9,"probs":[1,0,0,0,0,0,0]}]})");
                                               }});
    server.start();
    CHECK_THROWS_AS(remote_predict(RemoteOptions{.endpoint = server.endpoint()}, std::vector<std::string>{"x"}),
                    ProtocolError);
  }

  SUBCASE("response validation") {
    CHECK_THROWS_AS(parse_remote_response("nope", 1), ProtocolError);
    CHECK_THROWS_AS(parse_remote_response(R"({"results":[]})", 1), ProtocolError);
    CHECK_THROWS_AS(parse_remote_response(R"({"results":[{"code":1,"probs":[0.5,0.6,0,0,0,0,0]}]})", 1),
                    ProtocolError);
    CHECK_THROWS_AS(parse_remote_response(R"({"results":[{"code":1,"probs":[1,0,0]}]})", 1), ProtocolError);
    const auto ok = parse_remote_response(R"({"results":[{"code":2,"probs":[0,0,1,0,0,0,0]}]})", 1);
    CHECK(ok.at(0).code == 2);
  }

  SUBCASE("unreachable endpoint") {
    CHECK_THROWS_AS(remote_predict(RemoteOptions{.endpoint = "http://127.0.0.1:1/predict",
                                                 .timeout = std::chrono::milliseconds(300)},
                                   texts),
                    RemoteFailure);
  }
}
