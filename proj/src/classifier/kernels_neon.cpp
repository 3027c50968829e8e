// AArch64 variant; NEON with float64x2 is baseline there, so no runtime probe.
#include "polemos/classifier/kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

namespace polemos::kernels {
namespace {

void gather_accumulate_neon(const double* rows, const std::uint32_t* indices, const double* values,
                            std::size_t count, double* out) {
  float64x2_t acc[4];
  for (int k = 0; k < 4; ++k) acc[k] = vld1q_f64(out + 2 * k);
  for (std::size_t j = 0; j < count; ++j) {
    const double* row = rows + static_cast<std::size_t>(indices[j]) * kLanes;
    const float64x2_t v = vdupq_n_f64(values[j]);
    for (int k = 0; k < 4; ++k) acc[k] = vaddq_f64(acc[k], vmulq_f64(v, vld1q_f64(row + 2 * k)));
  }
  for (int k = 0; k < 4; ++k) vst1q_f64(out + 2 * k, acc[k]);
}

void scatter_axpy_neon(double* rows, const std::uint32_t* indices, const double* values,
                       std::size_t count, const double* coeff) {
  float64x2_t c[4];
  for (int k = 0; k < 4; ++k) c[k] = vld1q_f64(coeff + 2 * k);
  for (std::size_t j = 0; j < count; ++j) {
    double* row = rows + static_cast<std::size_t>(indices[j]) * kLanes;
    const float64x2_t v = vdupq_n_f64(values[j]);
    for (int k = 0; k < 4; ++k)
      vst1q_f64(row + 2 * k, vaddq_f64(vld1q_f64(row + 2 * k), vmulq_f64(v, c[k])));
  }
}

void scale_neon(double* data, std::size_t count, double factor) {
  const float64x2_t f = vdupq_n_f64(factor);
  std::size_t i = 0;
  for (; i + 2 <= count; i += 2) vst1q_f64(data + i, vmulq_f64(vld1q_f64(data + i), f));
  for (; i < count; ++i) data[i] *= factor;
}

const KernelTable kNeon{Isa::kNeon, gather_accumulate_neon, scatter_axpy_neon, scale_neon};

}  // namespace

const KernelTable* neon_kernels() { return &kNeon; }

}  // namespace polemos::kernels

#else

namespace polemos::kernels {
const KernelTable* neon_kernels() { return nullptr; }
}  // namespace polemos::kernels

#endif
