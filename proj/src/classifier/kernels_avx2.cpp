// Built with -mavx2 -ffp-contract=off on x86-64 only. No FMA: every lane does
// a multiply then an add, exactly like the scalar reference.
#include "polemos/classifier/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

namespace polemos::kernels {
namespace {

void gather_accumulate_avx2(const double* rows, const std::uint32_t* indices, const double* values,
                            std::size_t count, double* out) {
  __m256d lo = _mm256_loadu_pd(out);
  __m256d hi = _mm256_loadu_pd(out + 4);
  for (std::size_t j = 0; j < count; ++j) {
    const double* row = rows + static_cast<std::size_t>(indices[j]) * kLanes;
    const __m256d v = _mm256_set1_pd(values[j]);
    lo = _mm256_add_pd(lo, _mm256_mul_pd(v, _mm256_loadu_pd(row)));
    hi = _mm256_add_pd(hi, _mm256_mul_pd(v, _mm256_loadu_pd(row + 4)));
  }
  _mm256_storeu_pd(out, lo);
  _mm256_storeu_pd(out + 4, hi);
}

void scatter_axpy_avx2(double* rows, const std::uint32_t* indices, const double* values,
                       std::size_t count, const double* coeff) {
  const __m256d c_lo = _mm256_loadu_pd(coeff);
  const __m256d c_hi = _mm256_loadu_pd(coeff + 4);
  for (std::size_t j = 0; j < count; ++j) {
    double* row = rows + static_cast<std::size_t>(indices[j]) * kLanes;
    const __m256d v = _mm256_set1_pd(values[j]);
    _mm256_storeu_pd(row, _mm256_add_pd(_mm256_loadu_pd(row), _mm256_mul_pd(v, c_lo)));
    _mm256_storeu_pd(row + 4, _mm256_add_pd(_mm256_loadu_pd(row + 4), _mm256_mul_pd(v, c_hi)));
  }
}

void scale_avx2(double* data, std::size_t count, double factor) {
  const __m256d f = _mm256_set1_pd(factor);
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) _mm256_storeu_pd(data + i, _mm256_mul_pd(_mm256_loadu_pd(data + i), f));
  for (; i < count; ++i) data[i] *= factor;
}

const KernelTable kAvx2{Isa::kAvx2, gather_accumulate_avx2, scatter_axpy_avx2, scale_avx2};

}  // namespace

const KernelTable* avx2_kernels() {
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &kAvx2 : nullptr;
}

}  // namespace polemos::kernels

#else

namespace polemos::kernels {
const KernelTable* avx2_kernels() { return nullptr; }
}  // namespace polemos::kernels

#endif
