#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "polemos/classifier/model.hpp"
#include "polemos/classifier/remote.hpp"
#include "polemos/corpus/comment.hpp"

namespace polemos {

/// Anything that turns texts into stance predictions.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::vector<Prediction> predict_batch(std::span<const std::string> texts) = 0;
};

class ReferencePredictor final : public Predictor {
 public:
  explicit ReferencePredictor(const Model& model) : model_(model) {}
  std::vector<Prediction> predict_batch(std::span<const std::string> texts) override;

 private:
  const Model& model_;
};

class RemotePredictor final : public Predictor {
 public:
  explicit RemotePredictor(RemoteOptions options) : options_(std::move(options)) {}
  std::vector<Prediction> predict_batch(std::span<const std::string> texts) override {
    return remote_predict(options_, texts);
  }

 private:
  RemoteOptions options_;
};

struct PredictionRow {
  std::string comment_id;
  int code = 0;
  double confidence = 0.0;
};

struct PredictionSummary {
  std::size_t rows = 0;
  LabelCounts counts{};
};

nlohmann::json to_json(const PredictionSummary& s);

/// Writes `comment_id,code,confidence` rows in corpus order (confidence to
/// 6 decimals). The file is replaced atomically; on failure nothing changes.
PredictionSummary predict_corpus(Predictor& predictor, std::span<const Comment> corpus,
                                 const std::filesystem::path& out_csv, std::size_t batch_size = 512);

/// Throws ParseError on a malformed file.
std::vector<PredictionRow> read_predictions(const std::filesystem::path& csv_path);

}  // namespace polemos
