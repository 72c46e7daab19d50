#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vvca/domain.hpp"

namespace vvca {

/// Learnable mechanism state: log-weights alpha (w = e^alpha) and one
/// boost per bidder-bundle pair.
struct VvcaParams {
  AuctionSize size;
  std::vector<double> alpha;   // n
  std::vector<double> lambda;  // n x 2^m, bidder-major

  double lambda_at(int bidder, BundleMask bundle) const {
    return lambda[static_cast<std::size_t>(bidder) * size.bundle_count() + bundle];
  }
  double& lambda_at(int bidder, BundleMask bundle) {
    return lambda[static_cast<std::size_t>(bidder) * size.bundle_count() + bundle];
  }
  std::span<const double> lambda_row(int bidder) const {
    return {lambda.data() + static_cast<std::size_t>(bidder) * size.bundle_count(),
            size.bundle_count()};
  }

  std::vector<double> weights() const;  // e^alpha, elementwise

  /// alpha = 0, lambda = 0 (the classic VCG point).
  static VvcaParams zeros(AuctionSize size);

  void validate() const;  // finite entries, matching shapes
};

}  // namespace vvca
