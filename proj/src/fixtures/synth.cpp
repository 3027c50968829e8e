#include "polemos/fixtures/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "httplib.h"
#include "json.hpp"
#include "polemos/core/error.hpp"
#include "polemos/core/rng.hpp"

namespace polemos::fixtures {
namespace {

const std::vector<std::string> kFiller{"que", "los", "esto", "es", "una", "muy", "todo", "lo", "por", "más",
                                       "de", "el", "la", "en", "y", "no", "se", "como", "pero", "hay",
                                       "ya", "ahora", "siempre", "nadie", "gente", "mundo", "hoy", "tanto"};

const std::vector<std::string> kEmoji{"🇵🇸", "🇮🇱", "🙏", "💔", "😡", "😢", "🔥", "👏"};

// Mean like count per label.
constexpr std::array<double, kNumLabels> kLikeMean{12.0, 9.0, 5.0, 4.0, 2.0, 8.0, 15.0};

// Label shares at relative time t in [0, 1).
std::array<double, kNumLabels> label_weights(double t) {
  return {0.08 * (1.5 - t), 0.06 + 0.10 * t, 0.07, 0.22, 0.20, 0.08 * (1.2 - 0.5 * t), 0.16 - 0.08 * t};
}

int draw_label(Rng& rng, double t) {
  const auto w = label_weights(t);
  double total = 0;
  for (const double x : w) total += x;
  double u = rng.unit() * total;
  for (int c = 0; c < kNumLabels; ++c) {
    u -= w[static_cast<std::size_t>(c)];
    if (u < 0) return c;
  }
  return kNumLabels - 1;
}

const std::string& pick(Rng& rng, const std::vector<std::string>& v) { return v[rng.below(v.size())]; }

std::string compose(Rng& rng, int wording, bool entangle_code0) {
  const auto& vocab = label_vocabulary();
  int source = wording;
  if (entangle_code0 && wording == 0) source = rng.below(2) ? 2 : 5;

  std::vector<std::string> words;
  const std::size_t own = 2 + rng.below(3);
  for (std::size_t i = 0; i < own; ++i) words.push_back(pick(rng, vocab[static_cast<std::size_t>(source)]));
  const std::size_t fill = 2 + rng.below(4);
  for (std::size_t i = 0; i < fill; ++i) words.push_back(pick(rng, kFiller));
  if (rng.unit() < 0.25) {
    const auto other = static_cast<std::size_t>((static_cast<std::uint64_t>(source) + 1 + rng.below(kNumLabels - 1)) % kNumLabels);
    words.push_back(pick(rng, vocab[other]));
  }
  rng.shuffle(words);

  std::string text;
  for (const std::string& w : words) {
    if (!text.empty()) text += ' ';
    text += w;
  }
  if (!text.empty() && text[0] >= 'a' && text[0] <= 'z') text[0] = static_cast<char>(text[0] - 'a' + 'A');
  static const char* const kEnd[] = {"", ".", "!", "!!", "...", "?"};
  text += kEnd[rng.below(6)];
  if (rng.unit() < 0.1) text += " " + pick(rng, kEmoji);
  return text;
}

Timestamp at_fraction(const StudyWindow& w, double f) {
  const auto span = (w.end - w.start).count();
  return w.start + std::chrono::seconds(static_cast<std::int64_t>(f * static_cast<double>(span)));
}

}  // namespace

const std::array<std::vector<std::string>, kNumLabels>& label_vocabulary() {
  static const std::array<std::vector<std::string>, kNumLabels> vocab{{
      {"hamás", "terroristas", "rehenes", "secuestro", "yihadistas", "barbarie", "milicia", "asesinos", "cobardes",
       "destruir", "túneles", "cohetes", "escudos", "fanatismo", "liberen", "atentado", "terror", "extremistas"},
      {"genocida", "ocupación", "apartheid", "sionismo", "netanyahu", "criminales", "bombardeo", "colonial",
       "agresor", "impunidad", "asedio", "masacre", "sionistas", "crímenes", "invasor", "exterminio", "tel", "aviv"},
      {"invasores", "salvajes", "fanáticos", "merecen", "culpables", "violentos", "mienten", "propaganda",
       "victimismo", "atrasados", "provocan", "odio", "árabes", "islamistas", "ellos", "empezaron", "lloran", "atacan"},
      {"ambos", "lados", "paz", "diálogo", "tristeza", "inocentes", "oremos", "ojalá", "terminen", "dolor",
       "humanidad", "dios", "acuerdo", "bandos", "sufren", "basta", "negociar", "reconciliación"},
      {"video", "suscríbete", "canal", "música", "saludos", "primer", "comentario", "audio", "edición", "minuto",
       "presentador", "noticiero", "like", "señal", "sonido", "transmisión", "programa", "directo"},
      {"defensa", "derecho", "defenderse", "judío", "aliado", "democracia", "idf", "valientes", "soldados",
       "bendiga", "israelíes", "legítima", "seguridad", "jerusalén", "kibutz", "protegerse", "fuerza", "apoyamos"},
      {"libre", "liberación", "resistencia", "pueblo", "palestino", "solidaridad", "niños", "gaza", "justicia",
       "hermanos", "humanitaria", "palestina", "viva", "refugiados", "ayuda", "dignidad", "cisjordania", "sufrimiento"},
  }};
  return vocab;
}

std::vector<Comment> SynthCorpus::all_comments() const {
  std::vector<Comment> out;
  for (const PlatformVideo& v : videos) out.insert(out.end(), v.comments.begin(), v.comments.end());
  return out;
}

SynthCorpus generate_corpus(const SynthOptions& options) {
  if (options.videos == 0) throw InvalidArgument("synthetic corpus needs at least one video");
  Rng rng(options.seed);
  SynthCorpus corpus;
  for (std::size_t v = 0; v < options.videos; ++v) {
    PlatformVideo pv;
    char id[32];
    std::snprintf(id, sizeof id, "vid%03zu", v);
    pv.video.video_id = id;
    pv.video.title = "Noticias del conflicto, parte " + std::to_string(v + 1);
    pv.video.channel = "Canal " + std::string(1, static_cast<char>('A' + v % 6));
    pv.video.published_at = at_fraction(options.window, static_cast<double>(v) / static_cast<double>(options.videos));
    pv.comments_disabled =
        std::find(options.disabled_videos.begin(), options.disabled_videos.end(), v) != options.disabled_videos.end();
    corpus.videos.push_back(std::move(pv));
  }
  std::vector<std::size_t> open;
  for (std::size_t v = 0; v < corpus.videos.size(); ++v)
    if (!corpus.videos[v].comments_disabled) open.push_back(v);
  if (open.empty()) throw InvalidArgument("every synthetic video has comments disabled");

  const auto dirty = static_cast<std::size_t>(std::floor(options.dirty * static_cast<double>(options.comments)));
  const std::size_t clean = options.comments - dirty;
  std::vector<Comment> made;
  made.reserve(options.comments);
  for (std::size_t i = 0; i < clean; ++i) {
    const double t = rng.unit();
    const int label = draw_label(rng, t);
    int wording = label;
    if (rng.unit() < options.label_noise)
      wording = static_cast<int>((static_cast<std::uint64_t>(label) + 1 + rng.below(kNumLabels - 1)) % kNumLabels);
    Comment c;
    char id[32];
    std::snprintf(id, sizeof id, "c%06zu", i);
    c.comment_id = id;
    c.author = "usuario" + std::to_string(rng.below(2000));
    c.published_at = at_fraction(options.window, t);
    c.like_count = static_cast<std::int64_t>(std::floor(-std::log(1.0 - rng.unit()) * kLikeMean[static_cast<std::size_t>(label)]));
    c.text = compose(rng, wording, options.entangle_code0);
    c.video_id = corpus.videos[open[rng.below(open.size())]].video.video_id;
    corpus.truth.emplace(c.comment_id, label);
    made.push_back(std::move(c));
  }
  for (std::size_t k = 0; k < dirty; ++k) {
    Comment c;
    char id[32];
    std::snprintf(id, sizeof id, "d%06zu", k);
    c.comment_id = id;
    c.author = "usuario" + std::to_string(rng.below(2000));
    c.published_at = at_fraction(options.window, rng.unit());
    c.video_id = corpus.videos[open[rng.below(open.size())]].video.video_id;
    switch (k % 4) {
      case 0: c.text = "   "; break;
      case 1: c.text = pick(rng, kEmoji) + pick(rng, kEmoji) + pick(rng, kEmoji); break;
      case 2: {
        const Comment& original = made[rng.below(clean)];
        c.author = original.author;
        c.text = original.text;
        c.published_at = original.published_at;
        c.video_id = original.video_id;
        break;
      }
      default:
        c.text = compose(rng, static_cast<int>(rng.below(kNumLabels)), false);
        c.published_at = options.window.start - std::chrono::hours(24 + static_cast<std::int64_t>(rng.below(240)));
    }
    made.push_back(std::move(c));
  }
  // Dirty comments go after the clean ones so the survivor of each
  // duplicate pair is the original.
  std::vector<Comment> tail(std::make_move_iterator(made.begin() + static_cast<std::ptrdiff_t>(clean)),
                            std::make_move_iterator(made.end()));
  made.resize(clean);
  rng.shuffle(made);
  rng.shuffle(tail);
  made.insert(made.end(), std::make_move_iterator(tail.begin()), std::make_move_iterator(tail.end()));

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t v = 0; v < corpus.videos.size(); ++v) index[corpus.videos[v].video.video_id] = v;
  for (Comment& c : made) corpus.videos[index.at(c.video_id)].comments.push_back(std::move(c));
  return corpus;
}

SimulatedAnnotation simulate_annotator(int port, const std::unordered_map<std::string, int>& truth,
                                       int per_label_target, const std::string& annotator) {
  httplib::Client client("127.0.0.1", port);
  client.set_keep_alive(true);
  client.set_tcp_nodelay(true);
  SimulatedAnnotation sim;
  // Labels recorded in earlier rounds count toward the target.
  LabelCounts have{};
  {
    auto res = client.Get("/api/progress");
    ++sim.requests;
    if (!res) throw Error("annotation service unreachable: " + httplib::to_string(res.error()));
    if (res->status != 200) throw Error("GET /api/progress returned " + std::to_string(res->status));
    const nlohmann::json progress = nlohmann::json::parse(res->body);
    for (const auto& l : progress.at("labels"))
      have[l.at("code").get<std::size_t>()] = l.at("count").get<std::int64_t>();
  }
  auto full = [&] {
    return std::all_of(have.begin(), have.end(), [&](std::int64_t n) { return n >= per_label_target; });
  };
  const std::string next_path = "/api/next?annotator=" + annotator;
  while (!full()) {
    auto res = client.Get(next_path);
    ++sim.requests;
    if (!res) throw Error("annotation service unreachable: " + httplib::to_string(res.error()));
    if (res->status == 204) break;
    if (res->status != 200) throw Error("GET /api/next returned " + std::to_string(res->status));
    const std::string id = nlohmann::json::parse(res->body).at("comment_id").get<std::string>();
    const int code = truth.at(id);
    const bool take = have[static_cast<std::size_t>(code)] < per_label_target;
    const nlohmann::json body = take ? nlohmann::json{{"comment_id", id}, {"code", code}, {"annotator", annotator}}
                                     : nlohmann::json{{"comment_id", id}, {"annotator", annotator}};
    auto post = client.Post(take ? "/api/label" : "/api/skip", body.dump(), "application/json");
    ++sim.requests;
    if (!post) throw Error("annotation service unreachable: " + httplib::to_string(post.error()));
    if (post->status != (take ? 200 : 204)) throw Error("annotation POST returned " + std::to_string(post->status));
    if (take) {
      ++sim.labeled[static_cast<std::size_t>(code)];
      ++have[static_cast<std::size_t>(code)];
    }
    else ++sim.skipped;
  }
  return sim;
}

}  // namespace polemos::fixtures
