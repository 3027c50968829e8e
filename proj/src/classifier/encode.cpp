#include "polemos/classifier/encode.hpp"

#include "polemos/classifier/features.hpp"
#include "polemos/core/error.hpp"
#include "polemos/core/fileio.hpp"

namespace polemos {

HashedTokenIds::HashedTokenIds(std::uint64_t salt, std::int32_t vocab_size)
    : salt_(salt), vocab_size_(vocab_size) {
  if (vocab_size < 2) throw InvalidArgument("vocabulary needs at least 2 ids");
}

std::int32_t HashedTokenIds::id(std::string_view token) const {
  return 1 + static_cast<std::int32_t>(stable_hash(token, salt_) % static_cast<std::uint64_t>(vocab_size_ - 1));
}

Vocabulary::Vocabulary(std::vector<std::string> tokens) {
  for (std::size_t i = 0; i < tokens.size(); ++i)
    ids_.emplace(std::move(tokens[i]), static_cast<std::int32_t>(i));
  if (auto it = ids_.find("[UNK]"); it != ids_.end()) unknown_ = it->second;
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string::npos) end = content.size();
    std::string line = content.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(std::move(line));
    pos = end + 1;
  }
  return Vocabulary(std::move(tokens));
}

std::int32_t Vocabulary::id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? unknown_ : it->second;
}

EncodedInput encode(const TokenSequence& tokens, std::size_t length, const TokenIdMapper& ids) {
  if (length == 0) throw InvalidArgument("sequence length must be positive");
  EncodedInput e;
  e.input_word_ids.assign(length, 0);
  e.input_mask.assign(length, 0);
  e.input_type_ids.assign(length, 0);
  const std::size_t n = std::min(length, tokens.size());
  for (std::size_t i = 0; i < n; ++i) {
    e.input_word_ids[i] = ids.id(tokens[i]);
    e.input_mask[i] = 1;
  }
  return e;
}

nlohmann::json to_json(const EncodedInput& e) {
  return nlohmann::ordered_json{{"input_word_ids", e.input_word_ids},
                                {"input_mask", e.input_mask},
                                {"input_type_ids", e.input_type_ids}};
}

}  // namespace polemos
