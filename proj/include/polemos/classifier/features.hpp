#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "polemos/classifier/tokenizer.hpp"

namespace polemos {

inline constexpr unsigned kDefaultDimBits = 18;
inline constexpr std::uint64_t kDefaultSalt = 0x706f6c656d6f73ULL;

/// Sparse vector with strictly increasing indices.
struct FeatureVector {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::size_t nnz() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
  double norm() const;
};

/// 64-bit FNV-1a over the salt bytes then the data, finished with the
/// splitmix64 mixer. Stable across platforms and runs.
std::uint64_t stable_hash(std::string_view data, std::uint64_t salt);

/// Hashes unigrams and adjacent bigrams into 2^dim_bits buckets, sums
/// counts per bucket, then L2-normalizes.
class Featurizer {
 public:
  explicit Featurizer(std::uint64_t salt = kDefaultSalt, unsigned dim_bits = kDefaultDimBits);

  std::uint64_t salt() const { return salt_; }
  unsigned dim_bits() const { return dim_bits_; }
  std::uint32_t dim() const { return 1u << dim_bits_; }

  std::uint32_t unigram_bucket(std::string_view token) const;
  std::uint32_t bigram_bucket(std::string_view first, std::string_view second) const;

  FeatureVector operator()(const TokenSequence& tokens) const;

 private:
  std::uint64_t salt_;
  unsigned dim_bits_;
};

}  // namespace polemos
