#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vvca {

/// Item bundle as a bitmask: bit j set <=> item j in the bundle.
using BundleMask = std::uint32_t;

inline constexpr int kDefaultMaxItems = 16;

enum class SettingId : std::uint8_t { A, B, C, D };

SettingId parse_setting(std::string_view s);
std::string to_string(SettingId s);

/// Settings A-C expand additive item values; D adds per-bundle noise.
bool setting_is_additive(SettingId s);

struct AuctionSize {
  int n_bidders = 0;
  int n_items = 0;

  std::uint32_t bundle_count() const { return 1u << n_items; }

  /// Throws std::invalid_argument outside n >= 1, 1 <= m <= max_items.
  void validate(int max_items = kDefaultMaxItems) const;

  friend bool operator==(const AuctionSize&, const AuctionSize&) = default;
};

/// Per-bidder value of every item bundle, bidder-major (n x 2^m).
struct ValuationProfile {
  AuctionSize size;
  std::vector<double> values;
  bool additive = false;

  double value(int bidder, BundleMask bundle) const {
    return values[static_cast<std::size_t>(bidder) * size.bundle_count() + bundle];
  }
  double& value(int bidder, BundleMask bundle) {
    return values[static_cast<std::size_t>(bidder) * size.bundle_count() + bundle];
  }
  std::span<const double> row(int bidder) const {
    return {values.data() + static_cast<std::size_t>(bidder) * size.bundle_count(),
            size.bundle_count()};
  }

  static ValuationProfile zeros(AuctionSize size);
};

/// Bounds-checked lookup; throws std::out_of_range on a bad index.
double bundle_value(const ValuationProfile& profile, int bidder, BundleMask bundle);

/// Validates the profile invariants (v(empty) = 0, finite, non-negative,
/// exact additivity when flagged). Throws std::invalid_argument.
void validate_profile(const ValuationProfile& profile);

struct ValuationBatch {
  AuctionSize size;
  SettingId setting = SettingId::A;
  std::uint64_t seed = 0;
  std::vector<ValuationProfile> profiles;

  int count() const { return static_cast<int>(profiles.size()); }
};

/// All submasks of `mask`, descending from `mask` to 0 (the order the
/// winner-determination walk uses). Length is 2^popcount(mask).
std::vector<BundleMask> enumerate_subsets(BundleMask mask);

}  // namespace vvca
