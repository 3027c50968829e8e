#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "polemos/classifier/model.hpp"

namespace polemos {

struct LabeledText {
  std::string text;
  int code = 0;

  friend bool operator==(const LabeledText&, const LabeledText&) = default;
};

struct TrainConfig {
  int epochs = 15;
  /// Step size at epoch e (1-based) is learning_rate / sqrt(e).
  double learning_rate = 0.1;
  double l2 = 1e-6;
  std::uint64_t seed = 42;
  double holdout_fraction = 0.2;
  std::uint64_t salt = kDefaultSalt;
  unsigned dim_bits = kDefaultDimBits;

  /// Throws InvalidArgument on out-of-range values.
  void validate() const;
};

struct Example {
  FeatureVector x;
  int code = 0;
};

std::vector<Example> featurize_all(const Featurizer& f, std::span<const LabeledText> data);

struct Split {
  std::vector<LabeledText> train;
  std::vector<LabeledText> holdout;
};

/// Stratified seeded split: within each label, floor(n * fraction) items go
/// to the holdout. Both parts keep the input's relative order.
Split split_holdout(std::span<const LabeledText> data, double fraction, std::uint64_t seed);

/// Objective: mean softmax cross-entropy + (l2 / 2) * ||W||^2 (bias not
/// regularized).
double objective(const Model& model, std::span<const Example> examples, double l2);

struct Gradient {
  std::vector<double> weights;  // same layout as Model::rows()
  ClassScores bias{};
};

/// Analytic gradient of objective().
Gradient objective_gradient(const Model& model, std::span<const Example> examples, double l2);

/// Shuffled full-pass SGD on an already-featurized training set, starting
/// from `model`. Records one EpochStats (post-epoch objective and accuracy)
/// per epoch.
void fit(Model& model, std::span<const Example> train_set, const TrainConfig& config,
         const kernels::KernelTable& kernels = kernels::active_kernels());

struct TrainResult {
  Model model;
  std::vector<LabeledText> train_set;
  std::vector<LabeledText> holdout;
  std::vector<std::string> warnings;
};

/// Splits, trains from zero weights and reports labels missing from the
/// training data as warnings. Deterministic given (data, config).
/// Throws InvalidArgument on empty data or codes outside 0..6.
TrainResult train(std::span<const LabeledText> data, const TrainConfig& config,
                  const kernels::KernelTable& kernels = kernels::active_kernels());

}  // namespace polemos
