#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vvca/domain.hpp"
#include "vvca/mechanism_types.hpp"

namespace vvca::winner {

/// One bundle per bidder, pairwise disjoint. Items in no bundle stay
/// unallocated.
struct Allocation {
  std::vector<BundleMask> bundles;

  bool disjoint() const;
  BundleMask allocated_union() const;
  friend bool operator==(const Allocation&, const Allocation&) = default;
};

struct WinnerResult {
  Allocation allocation;
  double max_affine_welfare = 0.0;
  std::uint64_t op_count = 0;  // instrumented inner-loop candidate evaluations
};

/// sum_i w_i v_i(A_i) + lambda_i(A_i), folded in bidder order.
/// Throws std::invalid_argument when bundles overlap.
double affine_welfare(const ValuationProfile& profile, const VvcaParams& params,
                      const Allocation& alloc);

/// Subset dynamic program over pools S: layer i maximizes
/// MAW(i-1, S\B) + w_i v_i(B) + lambda_i(B) over submasks B, then the
/// allocation is recovered by backtracking from the best final pool.
/// Ties prefer the smaller bundle mask per cell and the smaller final
/// pool. `excluded_bidder` >= 0 scores that bidder's row with boosts
/// only (its valuation removed), which is how removed-bidder maxima in
/// payment computation are solved without copying the profile.
WinnerResult solve_winner(const ValuationProfile& profile, const VvcaParams& params,
                          int excluded_bidder = -1);

/// Exhaustive oracle over all (n+1)^m item assignments with the same
/// tie-breaking key (allocated set, then bundles from the last bidder
/// down). Throws when (n+1)^m exceeds `enumeration_cap`.
WinnerResult brute_force_winner(const ValuationProfile& profile, const VvcaParams& params,
                                std::uint64_t enumeration_cap = 10'000'000);

/// Elementwise identical to mapping solve_winner over the batch.
std::vector<WinnerResult> solve_winner_batch(const ValuationBatch& batch,
                                             const VvcaParams& params);

/// Exact candidate-evaluation count of the DP: 2^m + (n-1) * 3^m.
std::uint64_t dp_operation_count(AuctionSize size);

/// Process-wide instrumentation: `sweeps` counts winner-determination
/// passes (one per batch solve or single solve), `ops` accumulates
/// candidate evaluations.
namespace instrumentation {
std::uint64_t sweeps();
std::uint64_t ops();
void reset();
}  // namespace instrumentation

/// Batched solver: transposes a batch once into [block][bidder][bundle][lane]
/// lane blocks, rebuilds weighted score tables per `prepare`, and runs the
/// lane-parallel DP kernels per `solve`. Outputs are bit-identical to
/// solve_winner per profile for every kernel variant and worker count.
class BatchWinnerEngine {
 public:
  explicit BatchWinnerEngine(const ValuationBatch& batch);

  void prepare(const VvcaParams& params);

  /// Scores under per-profile parameter perturbations: profile p uses
  /// weights exp(alpha_i + sigma eps[p*n + i]) and boosts
  /// lambda + sigma delta[p*n*2^m + ...]. Used by the smoothed-welfare
  /// gradient estimator, where each valuation draws its own direction.
  void prepare_perturbed(const VvcaParams& base, double sigma,
                         std::span<const double> eps, std::span<const double> delta);

  /// One sweep (increments the sweep counter). alloc_out holds n masks
  /// per profile, maw_out one value per profile. Returns the total
  /// instrumented candidate-evaluation count across profiles.
  std::uint64_t solve(int excluded_bidder, std::span<BundleMask> alloc_out,
                      std::span<double> maw_out) const;

  int profile_count() const { return count_; }
  const AuctionSize& size() const { return size_; }

 private:
  AuctionSize size_;
  int count_ = 0;
  int blocks_ = 0;
  std::vector<double> values_t_;   // [block][bidder][bundle][lane]
  std::vector<double> scores_t_;   // same layout, w_i * v + lambda_i
  std::vector<double> lambda_rows_;  // [bidder][bundle]
  std::vector<double> weights_;
  bool prepared_ = false;
  bool per_profile_scores_ = false;
};

}  // namespace vvca::winner
