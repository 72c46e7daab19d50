#pragma once

// Shared test-side oracles, independent of the implementation paths
// they check.

#include <cmath>
#include <span>
#include <vector>

#include "vvca/mechanism.hpp"
#include "vvca/rng.hpp"
#include "vvca/winner.hpp"

namespace vvca::testing {

struct Directions {
  std::vector<double> eps;    // count x n
  std::vector<double> delta;  // count x n*2^m
};

inline Directions draw_directions(Rng& rng, const ValuationBatch& batch) {
  const std::size_t n = batch.size.n_bidders;
  const std::size_t table = n * batch.size.bundle_count();
  Directions d;
  d.eps.resize(batch.profiles.size() * n);
  d.delta.resize(batch.profiles.size() * table);
  for (double& e : d.eps) e = rng.normal();
  for (double& x : d.delta) x = rng.normal();
  return d;
}

/// Per-profile winning-allocation welfare under per-profile perturbed
/// parameters, valued at the original valuations.
inline std::vector<double> perturbed_welfare(winner::BatchWinnerEngine& engine,
                                             const ValuationBatch& batch,
                                             const VvcaParams& base, double sigma,
                                             const Directions& d) {
  const int n = batch.size.n_bidders;
  const std::size_t count = batch.profiles.size();
  engine.prepare_perturbed(base, sigma, d.eps, d.delta);
  std::vector<BundleMask> alloc(count * n);
  std::vector<double> maw(count);
  engine.solve(-1, alloc, maw);
  std::vector<double> z(count);
  for (std::size_t p = 0; p < count; ++p) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += batch.profiles[p].value(i, alloc[p * n + i]);
    z[p] = acc;
  }
  return z;
}

inline double perturbed_mean_welfare(winner::BatchWinnerEngine& engine,
                                     const ValuationBatch& batch, const VvcaParams& base,
                                     double sigma, const Directions& d) {
  const std::vector<double> z = perturbed_welfare(engine, batch, base, sigma, d);
  double acc = 0.0;
  for (double v : z) acc += v;
  return acc / static_cast<double>(z.size());
}

struct MeanWithError {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanWithError summarize(const std::vector<double>& samples) {
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= samples.size();
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  return {mean, std::sqrt(ss / (samples.size() - 1) / samples.size())};
}

}  // namespace vvca::testing
