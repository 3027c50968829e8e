#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "polemos/annotation/schema.hpp"

namespace polemos {

class Model;
struct LabeledText;

using ConfusionMatrix = std::array<std::array<std::size_t, kNumLabels>, kNumLabels>;

/// Rows of `confusion` are true labels, columns predicted labels.
/// Precision/recall/F1 with a zero denominator are 0.
struct Metrics {
  std::size_t total = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  std::array<double, kNumLabels> precision{};
  std::array<double, kNumLabels> recall{};
  std::array<double, kNumLabels> f1{};
  ConfusionMatrix confusion{};
};

/// Throws InvalidArgument on length mismatch, empty input or a code
/// outside 0..6.
Metrics evaluate(std::span<const int> truth, std::span<const int> predicted);
Metrics evaluate(const Model& model, std::span<const LabeledText> heldout);

nlohmann::json to_json(const Metrics& m);

struct CollapseWarning {
  int code;
  std::string message;
};

/// Codes the schema declares, the training data contained (all, when
/// training_counts is absent), and the model never predicted.
std::vector<CollapseWarning> detect_class_collapse(const LabelCounts& predicted_counts,
                                                   const std::optional<LabelCounts>& training_counts = std::nullopt);

}  // namespace polemos
