// Compiled with -ffp-contract=off: the vector variants must match these
// results bit for bit.
#include <cstdlib>
#include <cstring>

#include "polemos/classifier/kernels.hpp"

namespace polemos::kernels {
namespace {

void gather_accumulate_scalar(const double* rows, const std::uint32_t* indices, const double* values,
                              std::size_t count, double* out) {
  for (std::size_t j = 0; j < count; ++j) {
    const double* row = rows + static_cast<std::size_t>(indices[j]) * kLanes;
    const double v = values[j];
    for (std::size_t l = 0; l < kLanes; ++l) {
      const double t = v * row[l];
      out[l] = out[l] + t;
    }
  }
}

void scatter_axpy_scalar(double* rows, const std::uint32_t* indices, const double* values,
                         std::size_t count, const double* coeff) {
  for (std::size_t j = 0; j < count; ++j) {
    double* row = rows + static_cast<std::size_t>(indices[j]) * kLanes;
    const double v = values[j];
    for (std::size_t l = 0; l < kLanes; ++l) {
      const double t = v * coeff[l];
      row[l] = row[l] + t;
    }
  }
}

void scale_scalar(double* data, std::size_t count, double factor) {
  for (std::size_t i = 0; i < count; ++i) data[i] *= factor;
}

const KernelTable kScalar{Isa::kScalar, gather_accumulate_scalar, scatter_axpy_scalar, scale_scalar};

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "unknown";
}

const KernelTable& scalar_kernels() { return kScalar; }

const KernelTable& active_kernels() {
  static const KernelTable* chosen = [] {
    const char* env = std::getenv("POLEMOS_KERNELS");
    if (env != nullptr && std::strcmp(env, "scalar") == 0) return &kScalar;
    if (const KernelTable* t = avx2_kernels()) return t;
    if (const KernelTable* t = neon_kernels()) return t;
    return &kScalar;
  }();
  return *chosen;
}

}  // namespace polemos::kernels
