#include "vvca/kernels/dp_kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cstdint>
#include <limits>

namespace vvca::kernels {

namespace {

// Four 2-lane registers per 8-lane block; vbslq under the >= mask
// mirrors the scalar update exactly.

std::uint64_t init_vec_neon(const double* score, int n_items, double* maw_out) {
  const std::uint32_t full = 1u << n_items;
  std::uint64_t ops = 0;
  for (std::uint32_t s = 0; s < full; ++s) {
    const double* src = score + std::size_t{s} * kLanes;
    double* dst = maw_out + std::size_t{s} * kLanes;
    vst1q_f64(dst, vld1q_f64(src));
    vst1q_f64(dst + 2, vld1q_f64(src + 2));
    vst1q_f64(dst + 4, vld1q_f64(src + 4));
    vst1q_f64(dst + 6, vld1q_f64(src + 6));
    ++ops;
  }
  return ops;
}

std::uint64_t init_bcast_neon(const double* score, int n_items, double* maw_out) {
  const std::uint32_t full = 1u << n_items;
  std::uint64_t ops = 0;
  for (std::uint32_t s = 0; s < full; ++s) {
    const float64x2_t v = vdupq_n_f64(score[s]);
    double* dst = maw_out + std::size_t{s} * kLanes;
    vst1q_f64(dst, v);
    vst1q_f64(dst + 2, v);
    vst1q_f64(dst + 4, v);
    vst1q_f64(dst + 6, v);
    ++ops;
  }
  return ops;
}

template <bool kBroadcast>
std::uint64_t layer_neon(const double* maw_prev, const double* score, int n_items,
                         double* maw_out, std::int64_t* best_out) {
  const std::uint32_t full = 1u << n_items;
  const float64x2_t neg_inf = vdupq_n_f64(-std::numeric_limits<double>::infinity());
  std::uint64_t ops = 0;
  for (std::uint32_t s = 0; s < full; ++s) {
    float64x2_t best[4] = {neg_inf, neg_inf, neg_inf, neg_inf};
    int64x2_t idx[4] = {vdupq_n_s64(0), vdupq_n_s64(0), vdupq_n_s64(0), vdupq_n_s64(0)};
    std::uint32_t b = s;
    while (true) {
      const double* prev = maw_prev + std::size_t{s ^ b} * kLanes;
      const int64x2_t bi = vdupq_n_s64(static_cast<std::int64_t>(b));
      for (int h = 0; h < 4; ++h) {
        float64x2_t cand;
        if constexpr (kBroadcast) {
          cand = vaddq_f64(vld1q_f64(prev + 2 * h), vdupq_n_f64(score[b]));
        } else {
          cand = vaddq_f64(vld1q_f64(prev + 2 * h),
                           vld1q_f64(score + std::size_t{b} * kLanes + 2 * h));
        }
        const uint64x2_t mask = vcgeq_f64(cand, best[h]);
        best[h] = vbslq_f64(mask, cand, best[h]);
        idx[h] = vbslq_s64(mask, bi, idx[h]);
      }
      ++ops;
      if (b == 0) break;
      b = (b - 1) & s;
    }
    for (int h = 0; h < 4; ++h) {
      vst1q_f64(maw_out + std::size_t{s} * kLanes + 2 * h, best[h]);
      vst1q_s64(best_out + std::size_t{s} * kLanes + 2 * h, idx[h]);
    }
  }
  return ops;
}

constexpr DpLayerKernels kNeon{"neon", init_vec_neon, init_bcast_neon, layer_neon<false>,
                               layer_neon<true>};

}  // namespace

const DpLayerKernels* neon_kernels_if_supported() { return &kNeon; }

}  // namespace vvca::kernels

#else  // non-aarch64

namespace vvca::kernels {
const DpLayerKernels* neon_kernels_if_supported() { return nullptr; }
}  // namespace vvca::kernels

#endif
