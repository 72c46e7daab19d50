#pragma once

#include <cmath>
#include <cstdint>

namespace vvca {

/// Splittable 64-bit generator built on the splitmix64 mixer.
///
/// Substreams are derived by hashing (root seed, stream id), so
/// `split(k)` yields the same child no matter how many values the
/// parent has already produced. Batch samplers rely on this: profile k
/// always draws from `split(k)` and batches stay reproducible under
/// any parallel schedule. All draws consume a fixed number of words
/// (uniform: 1, normal: 2), so streams never desynchronize.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : root_(seed), state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1), 53 random mantissa bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; consumes exactly two words.
  double normal() {
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;        // [0, 1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kTwoPi * u2);
  }

  /// Child stream keyed by `stream`; independent of draw position.
  Rng split(std::uint64_t stream) const {
    return Rng(mix(root_ ^ mix(stream * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL)));
  }

  std::uint64_t root_seed() const { return root_; }

 private:
  static constexpr double kTwoPi = 6.28318530717958647692;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t root_;
  std::uint64_t state_;
};

}  // namespace vvca
