#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace vvca::kernels {

/// Lanes per kernel call. Batched winner determination lays a block of
/// kLanes profiles side by side, [bundle][lane], so the inner reduction
/// runs the same submask walk for all lanes at once.
inline constexpr int kLanes = 8;

/// One dynamic-programming layer over every pool S in [0, 2^m):
///
///   maw_out[S]   = max_{B subseteq S} maw_prev[S \ B] + score[B]
///   best_out[S]  = the maximizing B (ties: smallest mask)
///
/// Submasks are visited descending (S, (S-1)&S, ..., 0) and a candidate
/// replaces the incumbent on `cand >= best`, which leaves the smallest
/// tied mask. Every variant performs the identical arithmetic in the
/// identical order; outputs are bit-for-bit equal across variants.
///
/// `score` is either per-lane ([bundle][lane], the weighted-valuation
/// row) or lane-constant ([bundle], the boost-only row used when a
/// bidder's valuation is removed). Init layers have no reduction: the
/// first bidder takes the whole pool.
///
/// Each function returns the number of candidate evaluations performed
/// (per lane), counted inside the loop.
struct DpLayerKernels {
  const char* name;
  std::uint64_t (*init_vec)(const double* score, int n_items, double* maw_out);
  std::uint64_t (*init_bcast)(const double* score, int n_items, double* maw_out);
  std::uint64_t (*layer_vec)(const double* maw_prev, const double* score, int n_items,
                             double* maw_out, std::int64_t* best_out);
  std::uint64_t (*layer_bcast)(const double* maw_prev, const double* score, int n_items,
                               double* maw_out, std::int64_t* best_out);
};

const DpLayerKernels& scalar_kernels();

/// Variants usable on this machine (scalar first).
std::vector<const DpLayerKernels*> available_kernels();

/// Active variant: best available, or the one named by VVCA_KERNEL.
const DpLayerKernels& active_kernels();

/// Force a variant by name ("scalar", "avx2", "neon"); false if unknown
/// or unsupported on this machine.
bool set_active_kernels(std::string_view name);

}  // namespace vvca::kernels
