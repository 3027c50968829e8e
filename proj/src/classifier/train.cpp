#include "polemos/classifier/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "polemos/core/error.hpp"
#include "polemos/core/rng.hpp"

namespace polemos {
namespace {

// Fold the running L2 scale back into the weights before it underflows.
constexpr double kMinScale = 1e-150;

double cross_entropy(const ClassScores& z, int code) {
  const double peak = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (const double v : z) sum += std::exp(v - peak);
  return peak + std::log(sum) - z[static_cast<std::size_t>(code)];
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw InvalidArgument("epochs must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw InvalidArgument("learning_rate must be positive");
  if (!(l2 >= 0.0) || !std::isfinite(l2)) throw InvalidArgument("l2 must be non-negative");
  if (learning_rate * l2 >= 1.0) throw InvalidArgument("learning_rate * l2 must be < 1");
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) throw InvalidArgument("holdout_fraction must be in (0,1)");
}

std::vector<Example> featurize_all(const Featurizer& f, std::span<const LabeledText> data) {
  std::vector<Example> out;
  out.reserve(data.size());
  for (const LabeledText& d : data) out.push_back({f(tokenize(d.text)), d.code});
  return out;
}

Split split_holdout(std::span<const LabeledText> data, double fraction, std::uint64_t seed) {
  std::array<std::vector<std::size_t>, kNumLabels> by_label;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!is_valid_code(data[i].code)) throw InvalidArgument("label code outside 0..6");
    by_label[static_cast<std::size_t>(data[i].code)].push_back(i);
  }
  std::vector<bool> in_holdout(data.size(), false);
  Rng rng(seed);
  for (auto& members : by_label) {
    const auto take = static_cast<std::size_t>(std::floor(static_cast<double>(members.size()) * fraction));
    rng.shuffle(members);
    for (std::size_t k = 0; k < take; ++k) in_holdout[members[k]] = true;
  }
  Split s;
  for (std::size_t i = 0; i < data.size(); ++i) (in_holdout[i] ? s.holdout : s.train).push_back(data[i]);
  return s;
}

double objective(const Model& model, std::span<const Example> examples, double l2) {
  double loss = 0.0;
  for (const Example& ex : examples) loss += cross_entropy(model.logits(ex.x), ex.code);
  if (!examples.empty()) loss /= static_cast<double>(examples.size());
  return loss + 0.5 * l2 * model.weight_norm_squared();
}

Gradient objective_gradient(const Model& model, std::span<const Example> examples, double l2) {
  Gradient g;
  const auto rows = model.rows();
  g.weights.assign(rows.size(), 0.0);
  const double inv_n = examples.empty() ? 0.0 : 1.0 / static_cast<double>(examples.size());
  for (const Example& ex : examples) {
    ClassScores p = softmax(model.logits(ex.x, kernels::scalar_kernels()));
    p[static_cast<std::size_t>(ex.code)] -= 1.0;
    for (std::size_t j = 0; j < ex.x.nnz(); ++j) {
      const std::size_t base = static_cast<std::size_t>(ex.x.indices[j]) * kernels::kLanes;
      for (std::size_t c = 0; c < kNumLabels; ++c) g.weights[base + c] += p[c] * ex.x.values[j] * inv_n;
    }
    for (std::size_t c = 0; c < kNumLabels; ++c) g.bias[c] += p[c] * inv_n;
  }
  for (std::size_t i = 0; i < rows.size(); ++i) g.weights[i] += l2 * rows[i];
  return g;
}

void fit(Model& model, std::span<const Example> train_set, const TrainConfig& config,
         const kernels::KernelTable& k) {
  config.validate();
  const std::span<double> rows = model.rows();
  ClassScores& bias = model.bias();
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const double lr = config.learning_rate / std::sqrt(static_cast<double>(epoch));
    const double decay = 1.0 - lr * config.l2;
    // True weights are scale * rows; decaying the scalar applies the L2
    // shrink to every weight without touching the dense matrix.
    double scale = 1.0;
    rng.shuffle(order);

    for (const std::size_t idx : order) {
      const Example& ex = train_set[idx];
      alignas(64) double acc[kernels::kLanes] = {};
      k.gather_accumulate(rows.data(), ex.x.indices.data(), ex.x.values.data(), ex.x.nnz(), acc);
      ClassScores z{};
      for (std::size_t c = 0; c < kNumLabels; ++c) z[c] = scale * acc[c] + bias[c];
      ClassScores g = softmax(z);
      g[static_cast<std::size_t>(ex.code)] -= 1.0;

      if (config.l2 > 0.0) scale *= decay;
      alignas(64) double coeff[kernels::kLanes] = {};
      for (std::size_t c = 0; c < kNumLabels; ++c) coeff[c] = -lr * g[c] / scale;
      k.scatter_axpy(rows.data(), ex.x.indices.data(), ex.x.values.data(), ex.x.nnz(), coeff);
      for (std::size_t c = 0; c < kNumLabels; ++c) bias[c] -= lr * g[c];

      if (scale < kMinScale) {
        k.scale(rows.data(), rows.size(), scale);
        scale = 1.0;
      }
    }
    if (scale != 1.0) k.scale(rows.data(), rows.size(), scale);

    std::size_t correct = 0;
    for (const Example& ex : train_set)
      if (argmax(model.logits(ex.x, k)) == ex.code) ++correct;
    EpochStats stats;
    stats.loss = objective(model, train_set, config.l2);
    stats.train_accuracy =
        train_set.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(train_set.size());
    model.history().push_back(stats);
  }
}

TrainResult train(std::span<const LabeledText> data, const TrainConfig& config, const kernels::KernelTable& k) {
  config.validate();
  if (data.empty()) throw InvalidArgument("training data is empty");
  Split split = split_holdout(data, config.holdout_fraction, config.seed);

  TrainResult result{Model(config.salt, config.dim_bits), std::move(split.train), std::move(split.holdout), {}};
  for (const LabeledText& d : result.train_set) ++result.model.training_label_counts()[static_cast<std::size_t>(d.code)];
  for (const LabelInfo& l : label_schema())
    if (result.model.training_label_counts()[static_cast<std::size_t>(l.code)] == 0)
      result.warnings.push_back("label " + std::to_string(l.code) + " (" + std::string(l.name) +
                                ") has no training examples");

  const std::vector<Example> examples = featurize_all(result.model.featurizer(), result.train_set);
  fit(result.model, examples, config, k);
  return result;
}

}  // namespace polemos
