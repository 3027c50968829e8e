#include "polemos/classifier/features.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "polemos/core/error.hpp"

namespace polemos {
namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv_step(std::uint64_t h, unsigned char byte) { return (h ^ byte) * kFnvPrime; }

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Separates bigram halves; cannot occur inside a token.
constexpr char kBigramSeparator = '\x1f';

}  // namespace

double FeatureVector::norm() const {
  double sq = 0.0;
  for (const double v : values) sq += v * v;
  return std::sqrt(sq);
}

std::uint64_t stable_hash(std::string_view data, std::uint64_t salt) {
  std::uint64_t h = kFnvOffset;
  for (int i = 0; i < 8; ++i) h = fnv_step(h, static_cast<unsigned char>(salt >> (8 * i)));
  for (const char c : data) h = fnv_step(h, static_cast<unsigned char>(c));
  return mix(h);
}

Featurizer::Featurizer(std::uint64_t salt, unsigned dim_bits) : salt_(salt), dim_bits_(dim_bits) {
  if (dim_bits == 0 || dim_bits > 28) throw InvalidArgument("feature dimension bits must be in 1..28");
}

std::uint32_t Featurizer::unigram_bucket(std::string_view token) const {
  return static_cast<std::uint32_t>(stable_hash(token, salt_) & (dim() - 1));
}

std::uint32_t Featurizer::bigram_bucket(std::string_view first, std::string_view second) const {
  std::string key;
  key.reserve(first.size() + second.size() + 1);
  key.append(first);
  key.push_back(kBigramSeparator);
  key.append(second);
  return static_cast<std::uint32_t>(stable_hash(key, salt_) & (dim() - 1));
}

FeatureVector Featurizer::operator()(const TokenSequence& tokens) const {
  std::vector<std::uint32_t> buckets;
  buckets.reserve(tokens.size() * 2);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    buckets.push_back(unigram_bucket(tokens[i]));
    if (i + 1 < tokens.size()) buckets.push_back(bigram_bucket(tokens[i], tokens[i + 1]));
  }
  std::sort(buckets.begin(), buckets.end());

  FeatureVector fv;
  for (std::size_t i = 0; i < buckets.size();) {
    std::size_t j = i;
    while (j < buckets.size() && buckets[j] == buckets[i]) ++j;
    fv.indices.push_back(buckets[i]);
    fv.values.push_back(static_cast<double>(j - i));
    i = j;
  }
  const double n = fv.norm();
  if (n > 0.0)
    for (double& v : fv.values) v /= n;
  return fv;
}

}  // namespace polemos
