#include "polemos/classifier/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "polemos/core/error.hpp"
#include "polemos/core/fileio.hpp"

namespace polemos {
namespace {

constexpr const char* kFormat = "polemos-softmax";
constexpr int kVersion = 1;

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

double finite_number(const nlohmann::json& j) {
  if (!j.is_number()) throw ParseError("model: expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError("model: non-finite parameter");
  return v;
}

}  // namespace

ClassScores softmax(const ClassScores& logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  ClassScores p{};
  double sum = 0.0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    p[c] = std::exp(logits[c] - peak);
    sum += p[c];
  }
  for (double& v : p) v /= sum;
  return p;
}

int argmax(const ClassScores& scores) {
  int best = 0;
  for (int c = 1; c < kNumLabels; ++c)
    if (scores[static_cast<std::size_t>(c)] > scores[static_cast<std::size_t>(best)]) best = c;
  return best;
}

Model::Model(std::uint64_t salt, unsigned dim_bits)
    : featurizer_(salt, dim_bits), rows_(static_cast<std::size_t>(featurizer_.dim()) * kernels::kLanes, 0.0) {}

ClassScores Model::logits(const FeatureVector& x, const kernels::KernelTable& k) const {
  alignas(64) double acc[kernels::kLanes] = {};
  k.gather_accumulate(rows_.data(), x.indices.data(), x.values.data(), x.nnz(), acc);
  ClassScores z{};
  for (std::size_t c = 0; c < z.size(); ++c) z[c] = acc[c] + bias_[c];
  return z;
}

Prediction Model::predict(const FeatureVector& x, const kernels::KernelTable& k) const {
  Prediction p;
  p.probs = softmax(logits(x, k));
  p.code = argmax(p.probs);
  return p;
}

Prediction Model::predict(std::string_view text) const { return predict(featurizer_(tokenize(text))); }

double Model::weight_norm_squared() const {
  double sq = 0.0;
  for (const double w : rows_) sq += w * w;
  return sq;
}

bool Model::all_finite() const {
  return std::all_of(rows_.begin(), rows_.end(), [](double w) { return std::isfinite(w); }) &&
         std::all_of(bias_.begin(), bias_.end(), [](double b) { return std::isfinite(b); });
}

nlohmann::json Model::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["salt"] = salt();
  j["dim_bits"] = dim_bits();
  j["classes"] = kNumLabels;
  j["bias"] = bias_;
  j["training_label_counts"] = training_counts_;

  nlohmann::ordered_json weights = nlohmann::ordered_json::array();
  for (std::uint32_t f = 0; f < dim(); ++f) {
    const double* row = rows_.data() + static_cast<std::size_t>(f) * kernels::kLanes;
    if (std::all_of(row, row + kNumLabels, [](double w) { return std::bit_cast<std::uint64_t>(w) == 0; }))
      continue;
    weights.push_back({f, std::vector<double>(row, row + kNumLabels)});
  }
  j["weights"] = std::move(weights);

  nlohmann::ordered_json history = nlohmann::ordered_json::array();
  for (std::size_t e = 0; e < history_.size(); ++e)
    history.push_back({{"epoch", e + 1}, {"loss", history_[e].loss}, {"train_accuracy", history_[e].train_accuracy}});
  j["history"] = std::move(history);
  return j;
}

Model Model::from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != kFormat) throw ParseError("model: unknown format");
    if (j.at("version") != kVersion) throw ParseError("model: unsupported version");
    if (j.at("classes") != kNumLabels) throw ParseError("model: class count mismatch");
    Model m(j.at("salt").get<std::uint64_t>(), j.at("dim_bits").get<unsigned>());

    const auto& bias = j.at("bias");
    if (!bias.is_array() || bias.size() != kNumLabels) throw ParseError("model: bias must have 7 entries");
    for (std::size_t c = 0; c < kNumLabels; ++c) m.bias_[c] = finite_number(bias[c]);

    if (auto it = j.find("training_label_counts"); it != j.end())
      for (std::size_t c = 0; c < kNumLabels; ++c) m.training_counts_[c] = it->at(c).get<std::int64_t>();

    for (const auto& entry : j.at("weights")) {
      const auto f = entry.at(0).get<std::uint32_t>();
      if (f >= m.dim()) throw ParseError("model: weight index out of range");
      const auto& row = entry.at(1);
      if (row.size() != kNumLabels) throw ParseError("model: weight row must have 7 entries");
      for (int c = 0; c < kNumLabels; ++c) m.set_weight(c, f, finite_number(row[static_cast<std::size_t>(c)]));
    }
    for (const auto& h : j.at("history"))
      m.history_.push_back({h.at("loss").get<double>(), h.at("train_accuracy").get<double>()});
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
}

void Model::save(const std::filesystem::path& path) const { write_file_atomic(path, to_json().dump(1) + "\n"); }

Model Model::load(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return from_json(j);
}

bool operator==(const Model& a, const Model& b) {
  if (a.salt() != b.salt() || a.dim_bits() != b.dim_bits() || a.training_counts_ != b.training_counts_ ||
      a.history_.size() != b.history_.size())
    return false;
  for (std::size_t c = 0; c < a.bias_.size(); ++c)
    if (!same_bits(a.bias_[c], b.bias_[c])) return false;
  for (std::size_t i = 0; i < a.rows_.size(); ++i)
    if (!same_bits(a.rows_[i], b.rows_[i])) return false;
  for (std::size_t e = 0; e < a.history_.size(); ++e)
    if (!same_bits(a.history_[e].loss, b.history_[e].loss) ||
        !same_bits(a.history_[e].train_accuracy, b.history_[e].train_accuracy))
      return false;
  return true;
}

}  // namespace polemos
