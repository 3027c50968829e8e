#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace polemos {

inline constexpr int kNumLabels = 7;

/// Stance codes. The numeric values are part of every file format.
enum class Stance : int {
  kAntiHamas = 0,
  kAntiIsrael = 1,
  kAntiPalestino = 2,
  kSinPostura = 3,
  kNoRelacionado = 4,
  kProIsrael = 5,
  kProPalestino = 6,
};

struct LabelInfo {
  int code;
  std::string_view name;     // ANTI_HAMAS
  std::string_view display;  // Anti-Hamás
  std::string_view rubric;
};

/// The seven labels indexed by code.
const std::array<LabelInfo, kNumLabels>& label_schema();

inline bool is_valid_code(int code) { return code >= 0 && code < kNumLabels; }

std::optional<int> code_from_name(std::string_view name);
std::string_view label_name(int code);

using LabelCounts = std::array<std::int64_t, kNumLabels>;

}  // namespace polemos
