#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "vvca/domain.hpp"
#include "vvca/mechanism_types.hpp"
#include "vvca/winner.hpp"

namespace vvca::mechanism {

struct AuctionOutcome {
  winner::Allocation allocation;
  std::vector<double> payments;
  double revenue = 0.0;       // sum of payments
  double welfare_z = 0.0;     // social welfare of the winning allocation
  double continuous_f = 0.0;  // revenue minus welfare component
};

struct RevenueBreakdown {
  double r_mean = 0.0;
  double z_mean = 0.0;
  double f_mean = 0.0;
};

/// Copy of `profile` with bidder i's row zeroed; boosts are untouched
/// (they live in VvcaParams and stay active in removed-bidder solves).
ValuationProfile zero_bidder(const ValuationProfile& profile, int bidder);

/// Full auction evaluation: winning allocation, per-bidder payments
///
///   p_i = (1/w_i) max_A (sum_{j != i} w_j v_j(A) + lambda(A))
///       - (1/w_i) (sum_{j != i} w_j v_j(A*) + lambda(A*)),
///
/// and the revenue split R = Z + F with Z the social welfare of A* and
/// F = sum_i (M_{-i} - MAW*) / w_i. Performs n+1 winner solves.
AuctionOutcome run_auction(const ValuationProfile& profile, const VvcaParams& params);

/// Elementwise run_auction over a batch (shared solver passes).
std::vector<AuctionOutcome> run_auction_batch(const ValuationBatch& batch,
                                              const VvcaParams& params);

/// Batch means of (R, Z, F); fixed block-pairwise reduction order.
RevenueBreakdown revenue_breakdown_batch(const ValuationBatch& batch,
                                         const VvcaParams& params);

/// Mean social welfare of the winning allocations only (one solver
/// pass; no payments). This is the piecewise-constant revenue part.
double mean_social_welfare(const ValuationBatch& batch, const VvcaParams& params);

/// Bidder i's utility when `reported` is bid but `true_profile` is how
/// bundles are actually valued.
double utility(const ValuationProfile& true_profile, const ValuationProfile& reported,
               const VvcaParams& params, int bidder);

/// JSON round-trip for parameters; values survive exactly.
void save_params(const VvcaParams& params, const std::filesystem::path& path,
                 std::optional<SettingId> setting = std::nullopt,
                 std::optional<std::uint64_t> created_from_seed = std::nullopt);
VvcaParams load_params(const std::filesystem::path& path);

}  // namespace vvca::mechanism
