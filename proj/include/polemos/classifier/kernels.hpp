#pragma once

// Class-lane kernels for the softmax model.
//
// Weights are stored row-per-feature with the seven class scores padded to
// kLanes doubles, so every feature index addresses one 64-byte lane block.
// Each kernel exists as a scalar reference and as vector variants (AVX2 on
// x86-64, NEON on AArch64). All variants perform the same multiplies and
// adds in the same order without fused multiply-add, so results are
// bit-identical across variants.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace polemos::kernels {

inline constexpr std::size_t kLanes = 8;

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;

  /// out[l] = sum_j values[j] * rows[indices[j]*kLanes + l], accumulated
  /// over j in order starting from out's current contents.
  void (*gather_accumulate)(const double* rows, const std::uint32_t* indices, const double* values,
                            std::size_t count, double* out);

  /// rows[indices[j]*kLanes + l] += values[j] * coeff[l] for each j in order.
  void (*scatter_axpy)(double* rows, const std::uint32_t* indices, const double* values,
                       std::size_t count, const double* coeff);

  /// data[i] *= factor.
  void (*scale)(double* data, std::size_t count, double factor);
};

const KernelTable& scalar_kernels();

/// Returns nullptr when the variant is not compiled in or the CPU lacks it.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

/// Best variant for this CPU. Setting POLEMOS_KERNELS=scalar forces the
/// reference path. Resolved once per process.
const KernelTable& active_kernels();

}  // namespace polemos::kernels
