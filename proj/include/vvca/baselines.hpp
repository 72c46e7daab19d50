#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vvca/domain.hpp"
#include "vvca/mechanism_types.hpp"
#include "vvca/odvvca.hpp"

namespace vvca::baselines {

/// alpha = 0, lambda = 0.
VvcaParams vcg_params(AuctionSize size);

struct VirtualValuePoint {
  double value = 0.0;
  double virtual_value = 0.0;  // ironed, non-decreasing over the grid
};

/// Ironed virtual value phi(v) = v - (1 - F(v)) / f(v) of one bidder's
/// per-item marginal. Uniform settings carry the exact closed form
/// phi(v) = 2v - hi; the lognormal setting is tabulated on a quantile
/// grid and monotonized by pool-adjacent-violators.
struct VirtualValueTable {
  int bidder = 0;  // zero-based
  std::vector<VirtualValuePoint> grid;
  double reserve = 0.0;  // smallest value with ironed phi >= 0

  bool closed_form_uniform = false;
  double uniform_hi = 1.0;

  double virtual_value(double v) const;  // clamped at grid ends
  double inverse_virtual_value(double z) const;
};

/// Settings A-C only (per-item decomposition needs additive values).
VirtualValueTable build_virtual_value(SettingId setting, int bidder, int grid_size = 10000);

struct ItemOutcome {
  int winner = -1;  // -1: item stays unsold
  double payment = 0.0;
};

/// Single-item ironed-virtual-value rule: winner is the highest
/// non-negative ironed virtual value (ties: lowest bidder index);
/// payment is the inverse virtual value at the winning threshold.
ItemOutcome item_myerson_outcome(std::span<const double> item_values,
                                 std::span<const VirtualValueTable> tables);

/// Mean over profiles of the summed per-item payments. Throws on
/// non-additive batches.
double item_myerson_revenue(const ValuationBatch& batch);

/// Streaming variant over freshly sampled profiles.
double item_myerson_revenue_sampled(SettingId setting, AuctionSize size, std::int64_t count,
                                    std::uint64_t seed);

/// Revenue gradient with the per-iteration winning allocations frozen,
/// taken in raw (w, lambda) coordinates. Identical to grad_F_raw: with
/// allocations fixed the welfare component contributes no gradient.
odvvca::RawRevenueGradient bbbvvca_gradient(const ValuationBatch& batch,
                                            const VvcaParams& params);

/// Fixed-allocation gradient ascent on (w, lambda) with the projection
/// w_i >= 1e-3 after each step; ignores config.method and smoothing.
odvvca::TrainResult bbbvvca_train(SettingId setting, AuctionSize size,
                                  const odvvca::TrainConfig& config);

inline constexpr double kBbbMinWeight = 1e-3;
inline constexpr int kBbbDefaultIterations = 4000;

}  // namespace vvca::baselines
