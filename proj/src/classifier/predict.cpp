#include "polemos/classifier/predict.hpp"

#include <charconv>
#include <cstdio>

#include "polemos/core/csv.hpp"
#include "polemos/core/error.hpp"
#include "polemos/core/fileio.hpp"

namespace polemos {

std::vector<Prediction> ReferencePredictor::predict_batch(std::span<const std::string> texts) {
  std::vector<Prediction> out;
  out.reserve(texts.size());
  for (const std::string& t : texts) out.push_back(model_.predict(t));
  return out;
}

nlohmann::json to_json(const PredictionSummary& s) {
  nlohmann::ordered_json j;
  j["rows"] = s.rows;
  nlohmann::ordered_json counts;
  for (const LabelInfo& l : label_schema()) counts[std::string(l.name)] = s.counts[static_cast<std::size_t>(l.code)];
  j["counts"] = std::move(counts);
  return j;
}

PredictionSummary predict_corpus(Predictor& predictor, std::span<const Comment> corpus,
                                 const std::filesystem::path& out_csv, std::size_t batch_size) {
  if (batch_size == 0) throw InvalidArgument("batch size must be positive");
  PredictionSummary summary;
  std::string out = "comment_id,code,confidence\n";
  std::vector<std::string> texts;
  for (std::size_t start = 0; start < corpus.size(); start += batch_size) {
    const auto batch = corpus.subspan(start, std::min(batch_size, corpus.size() - start));
    texts.clear();
    for (const Comment& c : batch) texts.push_back(c.text);
    const std::vector<Prediction> preds = predictor.predict_batch(texts);
    if (preds.size() != batch.size()) throw ProtocolError("predictor returned a short batch");
    for (std::size_t i = 0; i < batch.size(); ++i) {
      char conf[32];
      std::snprintf(conf, sizeof conf, "%.6f", preds[i].confidence());
      out += csv::row({batch[i].comment_id, std::to_string(preds[i].code), conf});
      ++summary.counts[static_cast<std::size_t>(preds[i].code)];
      ++summary.rows;
    }
  }
  write_file_atomic(out_csv, out);
  return summary;
}

std::vector<PredictionRow> read_predictions(const std::filesystem::path& csv_path) {
  const auto rows = csv::parse(read_file(csv_path));
  if (rows.empty() || rows[0] != std::vector<std::string>{"comment_id", "code", "confidence"})
    throw ParseError(csv_path.string() + ": expected header comment_id,code,confidence");
  std::vector<PredictionRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() == 1 && r[0].empty()) continue;
    if (r.size() != 3) throw ParseError(csv_path.string() + ": row " + std::to_string(i + 1) + " needs 3 fields");
    PredictionRow p;
    p.comment_id = r[0];
    const auto [ptr, ec] = std::from_chars(r[1].data(), r[1].data() + r[1].size(), p.code);
    if (ec != std::errc{} || ptr != r[1].data() + r[1].size() || !is_valid_code(p.code))
      throw ParseError(csv_path.string() + ": row " + std::to_string(i + 1) + " has an invalid code");
    try {
      p.confidence = std::stod(r[2]);
    } catch (const std::exception&) {
      throw ParseError(csv_path.string() + ": row " + std::to_string(i + 1) + " has an invalid confidence");
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace polemos
