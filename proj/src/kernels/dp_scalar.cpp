#include <cstdint>
#include <limits>

#include "vvca/kernels/dp_kernels.hpp"

namespace vvca::kernels {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::uint64_t init_vec_scalar(const double* score, int n_items, double* maw_out) {
  const std::uint32_t full = 1u << n_items;
  std::uint64_t ops = 0;
  for (std::uint32_t s = 0; s < full; ++s) {
    for (int l = 0; l < kLanes; ++l) {
      maw_out[std::size_t{s} * kLanes + l] = score[std::size_t{s} * kLanes + l];
    }
    ++ops;
  }
  return ops;
}

std::uint64_t init_bcast_scalar(const double* score, int n_items, double* maw_out) {
  const std::uint32_t full = 1u << n_items;
  std::uint64_t ops = 0;
  for (std::uint32_t s = 0; s < full; ++s) {
    for (int l = 0; l < kLanes; ++l) {
      maw_out[std::size_t{s} * kLanes + l] = score[s];
    }
    ++ops;
  }
  return ops;
}

std::uint64_t layer_vec_scalar(const double* maw_prev, const double* score, int n_items,
                               double* maw_out, std::int64_t* best_out) {
  const std::uint32_t full = 1u << n_items;
  std::uint64_t ops = 0;
  for (std::uint32_t s = 0; s < full; ++s) {
    double best[kLanes];
    std::int64_t idx[kLanes];
    for (int l = 0; l < kLanes; ++l) {
      best[l] = kNegInf;
      idx[l] = 0;
    }
    std::uint32_t b = s;
    while (true) {
      const double* prev = maw_prev + std::size_t{s ^ b} * kLanes;
      const double* sc = score + std::size_t{b} * kLanes;
      for (int l = 0; l < kLanes; ++l) {
        const double cand = prev[l] + sc[l];
        if (cand >= best[l]) {
          best[l] = cand;
          idx[l] = b;
        }
      }
      ++ops;
      if (b == 0) break;
      b = (b - 1) & s;
    }
    for (int l = 0; l < kLanes; ++l) {
      maw_out[std::size_t{s} * kLanes + l] = best[l];
      best_out[std::size_t{s} * kLanes + l] = idx[l];
    }
  }
  return ops;
}

std::uint64_t layer_bcast_scalar(const double* maw_prev, const double* score, int n_items,
                                 double* maw_out, std::int64_t* best_out) {
  const std::uint32_t full = 1u << n_items;
  std::uint64_t ops = 0;
  for (std::uint32_t s = 0; s < full; ++s) {
    double best[kLanes];
    std::int64_t idx[kLanes];
    for (int l = 0; l < kLanes; ++l) {
      best[l] = kNegInf;
      idx[l] = 0;
    }
    std::uint32_t b = s;
    while (true) {
      const double* prev = maw_prev + std::size_t{s ^ b} * kLanes;
      const double sc = score[b];
      for (int l = 0; l < kLanes; ++l) {
        const double cand = prev[l] + sc;
        if (cand >= best[l]) {
          best[l] = cand;
          idx[l] = b;
        }
      }
      ++ops;
      if (b == 0) break;
      b = (b - 1) & s;
    }
    for (int l = 0; l < kLanes; ++l) {
      maw_out[std::size_t{s} * kLanes + l] = best[l];
      best_out[std::size_t{s} * kLanes + l] = idx[l];
    }
  }
  return ops;
}

constexpr DpLayerKernels kScalar{"scalar", init_vec_scalar, init_bcast_scalar,
                                 layer_vec_scalar, layer_bcast_scalar};

}  // namespace

const DpLayerKernels& scalar_kernels() { return kScalar; }

}  // namespace vvca::kernels
