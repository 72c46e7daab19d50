#include "vvca/kernels/dp_kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <cstdint>
#include <limits>

namespace vvca::kernels {

namespace {

// Two 4-lane registers cover the 8-lane block. The candidate update
// blends value and bundle index under the same >= mask the scalar
// kernel uses, so tie resolution is identical.

std::uint64_t init_vec_avx2(const double* score, int n_items, double* maw_out) {
  const std::uint32_t full = 1u << n_items;
  std::uint64_t ops = 0;
  for (std::uint32_t s = 0; s < full; ++s) {
    const double* src = score + std::size_t{s} * kLanes;
    _mm256_storeu_pd(maw_out + std::size_t{s} * kLanes, _mm256_loadu_pd(src));
    _mm256_storeu_pd(maw_out + std::size_t{s} * kLanes + 4, _mm256_loadu_pd(src + 4));
    ++ops;
  }
  return ops;
}

std::uint64_t init_bcast_avx2(const double* score, int n_items, double* maw_out) {
  const std::uint32_t full = 1u << n_items;
  std::uint64_t ops = 0;
  for (std::uint32_t s = 0; s < full; ++s) {
    const __m256d v = _mm256_set1_pd(score[s]);
    _mm256_storeu_pd(maw_out + std::size_t{s} * kLanes, v);
    _mm256_storeu_pd(maw_out + std::size_t{s} * kLanes + 4, v);
    ++ops;
  }
  return ops;
}

template <bool kBroadcast>
std::uint64_t layer_avx2(const double* maw_prev, const double* score, int n_items,
                         double* maw_out, std::int64_t* best_out) {
  const std::uint32_t full = 1u << n_items;
  const __m256d neg_inf = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
  std::uint64_t ops = 0;
  for (std::uint32_t s = 0; s < full; ++s) {
    __m256d best0 = neg_inf, best1 = neg_inf;
    __m256i idx0 = _mm256_setzero_si256(), idx1 = _mm256_setzero_si256();
    std::uint32_t b = s;
    while (true) {
      const double* prev = maw_prev + std::size_t{s ^ b} * kLanes;
      __m256d c0, c1;
      if constexpr (kBroadcast) {
        const __m256d sc = _mm256_set1_pd(score[b]);
        c0 = _mm256_add_pd(_mm256_loadu_pd(prev), sc);
        c1 = _mm256_add_pd(_mm256_loadu_pd(prev + 4), sc);
      } else {
        const double* sc = score + std::size_t{b} * kLanes;
        c0 = _mm256_add_pd(_mm256_loadu_pd(prev), _mm256_loadu_pd(sc));
        c1 = _mm256_add_pd(_mm256_loadu_pd(prev + 4), _mm256_loadu_pd(sc + 4));
      }
      const __m256d m0 = _mm256_cmp_pd(c0, best0, _CMP_GE_OQ);
      const __m256d m1 = _mm256_cmp_pd(c1, best1, _CMP_GE_OQ);
      best0 = _mm256_blendv_pd(best0, c0, m0);
      best1 = _mm256_blendv_pd(best1, c1, m1);
      const __m256i bi = _mm256_set1_epi64x(static_cast<std::int64_t>(b));
      idx0 = _mm256_castpd_si256(
          _mm256_blendv_pd(_mm256_castsi256_pd(idx0), _mm256_castsi256_pd(bi), m0));
      idx1 = _mm256_castpd_si256(
          _mm256_blendv_pd(_mm256_castsi256_pd(idx1), _mm256_castsi256_pd(bi), m1));
      ++ops;
      if (b == 0) break;
      b = (b - 1) & s;
    }
    _mm256_storeu_pd(maw_out + std::size_t{s} * kLanes, best0);
    _mm256_storeu_pd(maw_out + std::size_t{s} * kLanes + 4, best1);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(best_out + std::size_t{s} * kLanes), idx0);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(best_out + std::size_t{s} * kLanes + 4),
                        idx1);
  }
  return ops;
}

constexpr DpLayerKernels kAvx2{"avx2", init_vec_avx2, init_bcast_avx2, layer_avx2<false>,
                               layer_avx2<true>};

}  // namespace

const DpLayerKernels* avx2_kernels_if_supported() {
  return __builtin_cpu_supports("avx2") ? &kAvx2 : nullptr;
}

}  // namespace vvca::kernels

#else  // non-x86

namespace vvca::kernels {
const DpLayerKernels* avx2_kernels_if_supported() { return nullptr; }
}  // namespace vvca::kernels

#endif
