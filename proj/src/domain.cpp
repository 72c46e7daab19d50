#include "vvca/domain.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace vvca {

SettingId parse_setting(std::string_view s) {
  if (s == "A" || s == "a") return SettingId::A;
  if (s == "B" || s == "b") return SettingId::B;
  if (s == "C" || s == "c") return SettingId::C;
  if (s == "D" || s == "d") return SettingId::D;
  throw std::invalid_argument("unknown setting id: " + std::string(s));
}

std::string to_string(SettingId s) {
  switch (s) {
    case SettingId::A: return "A";
    case SettingId::B: return "B";
    case SettingId::C: return "C";
    case SettingId::D: return "D";
  }
  throw std::logic_error("invalid SettingId");
}

bool setting_is_additive(SettingId s) { return s != SettingId::D; }

void AuctionSize::validate(int max_items) const {
  if (n_bidders < 1) throw std::invalid_argument("n_bidders must be >= 1");
  if (n_items < 1 || n_items > max_items) {
    throw std::invalid_argument("n_items must be in [1, " + std::to_string(max_items) + "]");
  }
}

ValuationProfile ValuationProfile::zeros(AuctionSize size) {
  size.validate();
  ValuationProfile p;
  p.size = size;
  p.values.assign(static_cast<std::size_t>(size.n_bidders) * size.bundle_count(), 0.0);
  p.additive = true;
  return p;
}

double bundle_value(const ValuationProfile& profile, int bidder, BundleMask bundle) {
  if (bidder < 0 || bidder >= profile.size.n_bidders) {
    throw std::out_of_range("bidder index out of range");
  }
  if (bundle >= profile.size.bundle_count()) {
    throw std::out_of_range("bundle mask out of range");
  }
  return profile.value(bidder, bundle);
}

void validate_profile(const ValuationProfile& profile) {
  profile.size.validate();
  const std::uint32_t full = profile.size.bundle_count();
  if (profile.values.size() != static_cast<std::size_t>(profile.size.n_bidders) * full) {
    throw std::invalid_argument("value table shape mismatch");
  }
  for (int i = 0; i < profile.size.n_bidders; ++i) {
    if (profile.value(i, 0) != 0.0) {
      throw std::invalid_argument("empty-bundle value must be 0");
    }
    for (std::uint32_t b = 0; b < full; ++b) {
      double v = profile.value(i, b);
      if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument("values must be finite and non-negative");
      }
    }
    if (profile.additive) {
      for (std::uint32_t b = 0; b < full; ++b) {
        double sum = 0.0;
        for (int j = 0; j < profile.size.n_items; ++j) {
          if (b & (1u << j)) sum += profile.value(i, 1u << j);
        }
        if (profile.value(i, b) != sum) {
          throw std::invalid_argument("additive profile violates exact additivity");
        }
      }
    }
  }
}

std::vector<BundleMask> enumerate_subsets(BundleMask mask) {
  std::vector<BundleMask> out;
  out.reserve(std::size_t{1} << std::popcount(mask));
  BundleMask b = mask;
  while (true) {
    out.push_back(b);
    if (b == 0) break;
    b = (b - 1) & mask;
  }
  return out;
}

}  // namespace vvca
