#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "polemos/annotation/schema.hpp"
#include "polemos/classifier/features.hpp"
#include "polemos/classifier/kernels.hpp"

namespace polemos {

using ClassScores = std::array<double, kNumLabels>;

struct Prediction {
  int code = 0;
  ClassScores probs{};

  double confidence() const { return probs[static_cast<std::size_t>(code)]; }
};

/// Max-shifted softmax.
ClassScores softmax(const ClassScores& logits);

/// Index of the largest score; ties go to the lowest code.
int argmax(const ClassScores& scores);

struct EpochStats {
  double loss = 0.0;
  double train_accuracy = 0.0;
};

/// Multinomial softmax over hashed n-gram features: 7 x D weights plus bias.
///
/// Weights live in feature-major rows of kernels::kLanes doubles (lane 7 is
/// padding and stays zero), so the class-lane kernels can work on them.
class Model {
 public:
  explicit Model(std::uint64_t salt = kDefaultSalt, unsigned dim_bits = kDefaultDimBits);

  std::uint64_t salt() const { return featurizer_.salt(); }
  unsigned dim_bits() const { return featurizer_.dim_bits(); }
  std::uint32_t dim() const { return featurizer_.dim(); }
  const Featurizer& featurizer() const { return featurizer_; }

  double weight(int code, std::uint32_t feature) const {
    return rows_[static_cast<std::size_t>(feature) * kernels::kLanes + static_cast<std::size_t>(code)];
  }
  void set_weight(int code, std::uint32_t feature, double w) {
    rows_[static_cast<std::size_t>(feature) * kernels::kLanes + static_cast<std::size_t>(code)] = w;
  }
  std::span<double> rows() { return rows_; }
  std::span<const double> rows() const { return rows_; }

  ClassScores& bias() { return bias_; }
  const ClassScores& bias() const { return bias_; }

  std::vector<EpochStats>& history() { return history_; }
  const std::vector<EpochStats>& history() const { return history_; }

  /// Per-label example counts of the data the model was trained on.
  LabelCounts& training_label_counts() { return training_counts_; }
  const LabelCounts& training_label_counts() const { return training_counts_; }

  ClassScores logits(const FeatureVector& x, const kernels::KernelTable& k = kernels::active_kernels()) const;
  Prediction predict(const FeatureVector& x, const kernels::KernelTable& k = kernels::active_kernels()) const;
  Prediction predict(std::string_view text) const;

  /// Sum of squared weights (bias excluded).
  double weight_norm_squared() const;
  bool all_finite() const;

  nlohmann::json to_json() const;
  /// Throws ParseError on a malformed or non-finite model.
  static Model from_json(const nlohmann::json& j);

  void save(const std::filesystem::path& path) const;
  static Model load(const std::filesystem::path& path);

  friend bool operator==(const Model& a, const Model& b);

 private:
  Featurizer featurizer_;
  std::vector<double> rows_;
  ClassScores bias_{};
  std::vector<EpochStats> history_;
  LabelCounts training_counts_{};
};

}  // namespace polemos
