#include "polemos/classifier/metrics.hpp"

#include "polemos/classifier/model.hpp"
#include "polemos/classifier/train.hpp"
#include "polemos/core/error.hpp"

namespace polemos {

Metrics evaluate(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) throw InvalidArgument("truth and prediction lengths differ");
  if (truth.empty()) throw InvalidArgument("cannot evaluate an empty set");
  Metrics m;
  m.total = truth.size();
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!is_valid_code(truth[i]) || !is_valid_code(predicted[i])) throw InvalidArgument("label code outside 0..6");
    ++m.confusion[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(predicted[i])];
  }
  for (std::size_t c = 0; c < kNumLabels; ++c) m.correct += m.confusion[c][c];
  m.accuracy = static_cast<double>(m.correct) / static_cast<double>(m.total);

  for (std::size_t c = 0; c < kNumLabels; ++c) {
    std::size_t row = 0, col = 0;
    for (std::size_t k = 0; k < kNumLabels; ++k) {
      row += m.confusion[c][k];
      col += m.confusion[k][c];
    }
    const double tp = static_cast<double>(m.confusion[c][c]);
    m.precision[c] = col == 0 ? 0.0 : tp / static_cast<double>(col);
    m.recall[c] = row == 0 ? 0.0 : tp / static_cast<double>(row);
    const double denom = m.precision[c] + m.recall[c];
    m.f1[c] = denom == 0.0 ? 0.0 : 2.0 * m.precision[c] * m.recall[c] / denom;
  }
  return m;
}

Metrics evaluate(const Model& model, std::span<const LabeledText> heldout) {
  std::vector<int> truth, predicted;
  truth.reserve(heldout.size());
  predicted.reserve(heldout.size());
  for (const LabeledText& d : heldout) {
    truth.push_back(d.code);
    predicted.push_back(model.predict(d.text).code);
  }
  return evaluate(truth, predicted);
}

nlohmann::json to_json(const Metrics& m) {
  nlohmann::ordered_json j;
  j["total"] = m.total;
  j["correct"] = m.correct;
  j["accuracy"] = m.accuracy;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f1"] = m.f1;
  j["confusion"] = m.confusion;
  return j;
}

std::vector<CollapseWarning> detect_class_collapse(const LabelCounts& predicted,
                                                   const std::optional<LabelCounts>& training) {
  std::vector<CollapseWarning> out;
  for (const LabelInfo& l : label_schema()) {
    const auto c = static_cast<std::size_t>(l.code);
    if (predicted[c] != 0) continue;
    if (training && (*training)[c] == 0) continue;
    std::string msg = "class collapse: no comment was predicted as " + std::string(l.display) + " (code " +
                      std::to_string(l.code) + ")";
    if (training) msg += " although training data held " + std::to_string((*training)[c]) + " examples";
    out.push_back({l.code, std::move(msg)});
  }
  return out;
}

}  // namespace polemos
