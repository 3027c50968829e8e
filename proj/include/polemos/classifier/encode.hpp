#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "polemos/classifier/tokenizer.hpp"

namespace polemos {

/// The three-tensor input of a transformer text encoder, all of length L.
struct EncodedInput {
  std::vector<std::int32_t> input_word_ids;
  std::vector<std::int32_t> input_mask;
  std::vector<std::int32_t> input_type_ids;
};

/// Maps a token to a vocabulary id. Id 0 is reserved for padding.
class TokenIdMapper {
 public:
  virtual ~TokenIdMapper() = default;
  virtual std::int32_t id(std::string_view token) const = 0;
};

/// Ids in [1, vocab_size) from the stable token hash.
class HashedTokenIds final : public TokenIdMapper {
 public:
  explicit HashedTokenIds(std::uint64_t salt, std::int32_t vocab_size = 30522);
  std::int32_t id(std::string_view token) const override;

 private:
  std::uint64_t salt_;
  std::int32_t vocab_size_;
};

/// A served vocabulary file: one token per line, id = line number from 0.
/// Unknown tokens map to the "[UNK]" entry (or 1 when absent).
class Vocabulary final : public TokenIdMapper {
 public:
  static Vocabulary load(const std::filesystem::path& path);
  explicit Vocabulary(std::vector<std::string> tokens);

  std::int32_t id(std::string_view token) const override;
  std::size_t size() const { return ids_.size(); }

 private:
  std::unordered_map<std::string, std::int32_t> ids_;
  std::int32_t unknown_ = 1;
};

/// Truncates or pads to `length`; mask is 1 exactly on real tokens; type
/// ids are all 0 (single segment). Throws InvalidArgument when length == 0.
EncodedInput encode(const TokenSequence& tokens, std::size_t length, const TokenIdMapper& ids);

nlohmann::json to_json(const EncodedInput& e);

}  // namespace polemos
