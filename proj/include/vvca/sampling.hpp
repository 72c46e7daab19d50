#pragma once

#include <cstdint>
#include <filesystem>

#include "vvca/domain.hpp"
#include "vvca/rng.hpp"

namespace vvca {

/// Draws one valuation profile.
///
/// Draw order is fixed: for each bidder (ascending), m item values; for
/// setting D, one noise term per non-empty bundle in ascending mask
/// order. Bundle tables expand item values by ascending-item left fold,
/// so additivity holds bit-exactly for settings A-C.
///
///   A: item values U[0, 1]
///   B: item values U[0, i] with 1-based bidder index i
///   C: item values exp(N(0, 1) / i), i.e. Lognormal(0, sigma^2 = 1/i^2)
///   D: item values U[1, 2], bundle noise U[-|S|/2, |S|/2]
ValuationProfile sample_profile(SettingId setting, AuctionSize size, Rng& rng);

/// `count` profiles on independent substreams rng(seed).split(k); the
/// same (setting, size, count, seed) always yields a bit-identical batch.
ValuationBatch sample_batch(SettingId setting, AuctionSize size, int count,
                            std::uint64_t seed);

/// Binary batch file: magic/version header {setting, n, m, count, seed}
/// followed by the row-major value tables as little-endian doubles.
void write_batch(const ValuationBatch& batch, const std::filesystem::path& path);
ValuationBatch read_batch(const std::filesystem::path& path);

}  // namespace vvca
