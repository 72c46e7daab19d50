#include "vvca/winner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "vvca/kernels/dp_kernels.hpp"
#include "vvca/parallel.hpp"

namespace vvca::winner {

namespace instrumentation {
namespace {
std::atomic<std::uint64_t> g_sweeps{0};
std::atomic<std::uint64_t> g_ops{0};
}  // namespace
std::uint64_t sweeps() { return g_sweeps.load(std::memory_order_relaxed); }
std::uint64_t ops() { return g_ops.load(std::memory_order_relaxed); }
void reset() {
  g_sweeps.store(0, std::memory_order_relaxed);
  g_ops.store(0, std::memory_order_relaxed);
}
namespace {
void add(std::uint64_t sweeps_n, std::uint64_t ops_n) {
  g_sweeps.fetch_add(sweeps_n, std::memory_order_relaxed);
  g_ops.fetch_add(ops_n, std::memory_order_relaxed);
}
}  // namespace
}  // namespace instrumentation

bool Allocation::disjoint() const {
  BundleMask seen = 0;
  for (BundleMask b : bundles) {
    if (seen & b) return false;
    seen |= b;
  }
  return true;
}

BundleMask Allocation::allocated_union() const {
  BundleMask u = 0;
  for (BundleMask b : bundles) u |= b;
  return u;
}

namespace {

void check_shapes(const ValuationProfile& profile, const VvcaParams& params) {
  if (profile.size != params.size) {
    throw std::invalid_argument("profile and params sizes differ");
  }
}

// score[i][B] = w_i v_i(B) + lambda_i(B); every solver path sums these
// identical values in bidder order, which keeps the DP, the batched
// kernels, and the brute-force oracle bit-comparable.
std::vector<double> build_scores(const ValuationProfile& profile, const VvcaParams& params,
                                 const std::vector<double>& weights) {
  const std::uint32_t full = profile.size.bundle_count();
  std::vector<double> scores(static_cast<std::size_t>(profile.size.n_bidders) * full);
  for (int i = 0; i < profile.size.n_bidders; ++i) {
    const double w = weights[i];
    for (std::uint32_t b = 0; b < full; ++b) {
      scores[static_cast<std::size_t>(i) * full + b] = w * profile.value(i, b) + params.lambda_at(i, b);
    }
  }
  return scores;
}

}  // namespace

double affine_welfare(const ValuationProfile& profile, const VvcaParams& params,
                      const Allocation& alloc) {
  check_shapes(profile, params);
  if (alloc.bundles.size() != static_cast<std::size_t>(profile.size.n_bidders)) {
    throw std::invalid_argument("allocation has wrong bidder count");
  }
  if (!alloc.disjoint()) throw std::invalid_argument("allocation bundles overlap");
  const std::vector<double> w = params.weights();
  double acc = 0.0;
  for (int i = 0; i < profile.size.n_bidders; ++i) {
    const BundleMask b = alloc.bundles[i];
    acc += w[i] * profile.value(i, b) + params.lambda_at(i, b);
  }
  return acc;
}

WinnerResult solve_winner(const ValuationProfile& profile, const VvcaParams& params,
                          int excluded_bidder) {
  check_shapes(profile, params);
  const int n = profile.size.n_bidders;
  const std::uint32_t full = profile.size.bundle_count();
  const std::vector<double> weights = params.weights();

  // Row of the excluded bidder scores with boosts only.
  auto score_at = [&](int i, std::uint32_t b) {
    return i == excluded_bidder
               ? params.lambda_at(i, b)
               : weights[i] * profile.value(i, b) + params.lambda_at(i, b);
  };

  std::vector<double> maw(static_cast<std::size_t>(n) * full);
  std::vector<BundleMask> best_bundle(n > 1 ? static_cast<std::size_t>(n - 1) * full : 0);
  std::uint64_t ops = 0;

  for (std::uint32_t s = 0; s < full; ++s) {
    maw[s] = score_at(0, s);
    ++ops;
  }
  for (int i = 1; i < n; ++i) {
    const double* prev = maw.data() + static_cast<std::size_t>(i - 1) * full;
    double* cur = maw.data() + static_cast<std::size_t>(i) * full;
    BundleMask* ab = best_bundle.data() + static_cast<std::size_t>(i - 1) * full;
    for (std::uint32_t s = 0; s < full; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      BundleMask best_b = 0;
      std::uint32_t b = s;
      while (true) {
        const double cand = prev[s ^ b] + score_at(i, b);
        ++ops;
        if (cand >= best) {  // descending walk: ties keep the smaller mask
          best = cand;
          best_b = b;
        }
        if (b == 0) break;
        b = (b - 1) & s;
      }
      cur[s] = best;
      ab[s] = best_b;
    }
  }

  const double* last = maw.data() + static_cast<std::size_t>(n - 1) * full;
  double best = last[0];
  std::uint32_t pool = 0;
  for (std::uint32_t s = 1; s < full; ++s) {
    if (last[s] > best) {  // ascending scan: ties keep the smaller pool
      best = last[s];
      pool = s;
    }
  }

  WinnerResult result;
  result.allocation.bundles.assign(n, 0);
  for (int i = n - 1; i >= 1; --i) {
    const BundleMask b = best_bundle[static_cast<std::size_t>(i - 1) * full + pool];
    result.allocation.bundles[i] = b;
    pool ^= b;
  }
  result.allocation.bundles[0] = pool;
  result.max_affine_welfare = best;
  result.op_count = ops;
  instrumentation::add(1, ops);
  return result;
}

WinnerResult brute_force_winner(const ValuationProfile& profile, const VvcaParams& params,
                                std::uint64_t enumeration_cap) {
  check_shapes(profile, params);
  const int n = profile.size.n_bidders;
  const int m = profile.size.n_items;

  std::uint64_t total = 1;
  for (int j = 0; j < m; ++j) {
    total *= static_cast<std::uint64_t>(n) + 1;
    if (total > enumeration_cap) {
      throw std::invalid_argument("instance too large for the enumeration oracle");
    }
  }

  const std::vector<double> scores = build_scores(profile, params, params.weights());
  const std::uint32_t full = profile.size.bundle_count();

  // Same key as the DP: welfare, then smaller allocated set, then
  // smaller bundles from the last bidder down.
  auto tie_less = [&](const std::vector<BundleMask>& a, const std::vector<BundleMask>& b) {
    BundleMask ua = 0, ub = 0;
    for (int i = 0; i < n; ++i) {
      ua |= a[i];
      ub |= b[i];
    }
    if (ua != ub) return ua < ub;
    for (int i = n - 1; i >= 0; --i) {
      if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
  };

  std::vector<int> owner(m, 0);  // 0 = unallocated, d = bidder d-1
  std::vector<BundleMask> bundles(n, 0);
  double best_welfare = -std::numeric_limits<double>::infinity();
  std::vector<BundleMask> best(n, 0);
  bool have_best = false;

  for (std::uint64_t it = 0; it < total; ++it) {
    std::fill(bundles.begin(), bundles.end(), 0);
    for (int j = 0; j < m; ++j) {
      if (owner[j] > 0) bundles[owner[j] - 1] |= (1u << j);
    }
    double welfare = 0.0;
    for (int i = 0; i < n; ++i) welfare += scores[static_cast<std::size_t>(i) * full + bundles[i]];
    if (!have_best || welfare > best_welfare ||
        (welfare == best_welfare && tie_less(bundles, best))) {
      best_welfare = welfare;
      best = bundles;
      have_best = true;
    }
    for (int j = 0; j < m; ++j) {  // odometer
      if (++owner[j] <= n) break;
      owner[j] = 0;
    }
  }

  WinnerResult result;
  result.allocation.bundles = best;
  result.max_affine_welfare = best_welfare;
  result.op_count = total;
  return result;
}

std::uint64_t dp_operation_count(AuctionSize size) {
  size.validate();
  std::uint64_t pow3 = 1;
  for (int j = 0; j < size.n_items; ++j) pow3 *= 3;
  return (std::uint64_t{1} << size.n_items) +
         static_cast<std::uint64_t>(size.n_bidders - 1) * pow3;
}

// ---------------------------------------------------------------------------
// Batched engine
// ---------------------------------------------------------------------------

namespace {
constexpr int kL = kernels::kLanes;
}

BatchWinnerEngine::BatchWinnerEngine(const ValuationBatch& batch) {
  if (batch.profiles.empty()) throw std::invalid_argument("empty batch");
  size_ = batch.size;
  size_.validate();
  count_ = batch.count();
  blocks_ = (count_ + kL - 1) / kL;
  for (const ValuationProfile& p : batch.profiles) {
    if (p.size != size_) throw std::invalid_argument("batch profiles disagree on size");
  }

  const std::uint32_t full = size_.bundle_count();
  const std::size_t block_stride = static_cast<std::size_t>(size_.n_bidders) * full * kL;
  values_t_.assign(static_cast<std::size_t>(blocks_) * block_stride, 0.0);
  parallel_for(blocks_, 1, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t blk = lo; blk < hi; ++blk) {
      double* dst = values_t_.data() + blk * block_stride;
      for (int lane = 0; lane < kL; ++lane) {
        const std::size_t p = blk * kL + lane;
        if (p >= static_cast<std::size_t>(count_)) break;
        const double* src = batch.profiles[p].values.data();
        for (std::size_t ib = 0; ib < static_cast<std::size_t>(size_.n_bidders) * full; ++ib) {
          dst[ib * kL + lane] = src[ib];
        }
      }
    }
  });
}

void BatchWinnerEngine::prepare(const VvcaParams& params) {
  if (params.size != size_) throw std::invalid_argument("params size mismatch");
  weights_ = params.weights();
  lambda_rows_ = params.lambda;
  const std::uint32_t full = size_.bundle_count();
  const std::size_t block_stride = static_cast<std::size_t>(size_.n_bidders) * full * kL;
  scores_t_.resize(values_t_.size());
  parallel_for(blocks_, 1, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t blk = lo; blk < hi; ++blk) {
      const double* v = values_t_.data() + blk * block_stride;
      double* sc = scores_t_.data() + blk * block_stride;
      for (int i = 0; i < size_.n_bidders; ++i) {
        const double w = weights_[i];
        const double* lam = lambda_rows_.data() + static_cast<std::size_t>(i) * full;
        const std::size_t row = static_cast<std::size_t>(i) * full * kL;
        for (std::uint32_t b = 0; b < full; ++b) {
          for (int l = 0; l < kL; ++l) {
            sc[row + std::size_t{b} * kL + l] = w * v[row + std::size_t{b} * kL + l] + lam[b];
          }
        }
      }
    }
  });
  prepared_ = true;
  per_profile_scores_ = false;
}

void BatchWinnerEngine::prepare_perturbed(const VvcaParams& base, double sigma,
                                          std::span<const double> eps,
                                          std::span<const double> delta) {
  if (base.size != size_) throw std::invalid_argument("params size mismatch");
  const int n = size_.n_bidders;
  const std::uint32_t full = size_.bundle_count();
  const std::size_t table = static_cast<std::size_t>(n) * full;
  if (eps.size() != static_cast<std::size_t>(count_) * n ||
      delta.size() != static_cast<std::size_t>(count_) * table) {
    throw std::invalid_argument("perturbation span size mismatch");
  }
  weights_ = base.weights();
  lambda_rows_ = base.lambda;
  const std::size_t block_stride = table * kL;
  scores_t_.resize(values_t_.size());
  parallel_for(blocks_, 1, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t blk = lo; blk < hi; ++blk) {
      const double* v = values_t_.data() + blk * block_stride;
      double* sc = scores_t_.data() + blk * block_stride;
      const int lanes = std::min<int>(kL, count_ - static_cast<int>(blk) * kL);
      for (int l = 0; l < lanes; ++l) {
        const std::size_t p = blk * kL + l;
        const double* d_eps = eps.data() + p * n;
        const double* d_del = delta.data() + p * table;
        for (int i = 0; i < n; ++i) {
          const double w = std::exp(base.alpha[i] + sigma * d_eps[i]);
          const std::size_t row = static_cast<std::size_t>(i) * full * kL;
          for (std::uint32_t b = 0; b < full; ++b) {
            sc[row + std::size_t{b} * kL + l] =
                w * v[row + std::size_t{b} * kL + l] +
                (base.lambda[static_cast<std::size_t>(i) * full + b] +
                 sigma * d_del[static_cast<std::size_t>(i) * full + b]);
          }
        }
      }
    }
  });
  prepared_ = true;
  per_profile_scores_ = true;
}

std::uint64_t BatchWinnerEngine::solve(int excluded_bidder, std::span<BundleMask> alloc_out,
                                       std::span<double> maw_out) const {
  if (!prepared_) throw std::logic_error("solve before prepare");
  const int n = size_.n_bidders;
  if (excluded_bidder < -1 || excluded_bidder >= n) {
    throw std::invalid_argument("excluded bidder out of range");
  }
  if (excluded_bidder >= 0 && per_profile_scores_) {
    throw std::logic_error("removed-bidder solves need shared parameters");
  }
  if (alloc_out.size() != static_cast<std::size_t>(count_) * n ||
      maw_out.size() != static_cast<std::size_t>(count_)) {
    throw std::invalid_argument("output span size mismatch");
  }
  const std::uint32_t full = size_.bundle_count();
  const std::size_t block_stride = static_cast<std::size_t>(n) * full * kL;
  const kernels::DpLayerKernels& ker = kernels::active_kernels();
  std::atomic<std::uint64_t> total_ops{0};

  parallel_for(blocks_, 1, [&](std::size_t lo, std::size_t hi) {
    thread_local std::vector<double> maw_a, maw_b;
    thread_local std::vector<std::int64_t> ab;
    maw_a.resize(std::size_t{full} * kL);
    maw_b.resize(std::size_t{full} * kL);
    ab.resize(static_cast<std::size_t>(std::max(1, n - 1)) * full * kL);

    for (std::size_t blk = lo; blk < hi; ++blk) {
      const double* block_scores = scores_t_.data() + blk * block_stride;
      std::uint64_t ops = 0;

      double* prev = maw_a.data();
      double* cur = maw_b.data();
      if (excluded_bidder == 0) {
        ops += ker.init_bcast(lambda_rows_.data(), size_.n_items, prev);
      } else {
        ops += ker.init_vec(block_scores, size_.n_items, prev);
      }
      for (int i = 1; i < n; ++i) {
        std::int64_t* layer_ab = ab.data() + static_cast<std::size_t>(i - 1) * full * kL;
        if (i == excluded_bidder) {
          ops += ker.layer_bcast(prev, lambda_rows_.data() + static_cast<std::size_t>(i) * full,
                                 size_.n_items, cur, layer_ab);
        } else {
          ops += ker.layer_vec(prev, block_scores + static_cast<std::size_t>(i) * full * kL,
                               size_.n_items, cur, layer_ab);
        }
        std::swap(prev, cur);
      }

      const int lanes = std::min<int>(kL, count_ - static_cast<int>(blk) * kL);
      for (int l = 0; l < lanes; ++l) {
        double best = prev[0 * kL + l];
        std::uint32_t pool = 0;
        for (std::uint32_t s = 1; s < full; ++s) {
          if (prev[std::size_t{s} * kL + l] > best) {
            best = prev[std::size_t{s} * kL + l];
            pool = s;
          }
        }
        const std::size_t p = blk * kL + l;
        maw_out[p] = best;
        BundleMask* bundles = alloc_out.data() + p * n;
        for (int i = n - 1; i >= 1; --i) {
          const BundleMask b = static_cast<BundleMask>(
              ab[(static_cast<std::size_t>(i - 1) * full + pool) * kL + l]);
          bundles[i] = b;
          pool ^= b;
        }
        bundles[0] = pool;
      }
      total_ops.fetch_add(ops * lanes, std::memory_order_relaxed);
    }
  });

  const std::uint64_t ops = total_ops.load(std::memory_order_relaxed);
  instrumentation::add(1, ops);
  return ops;
}

std::vector<WinnerResult> solve_winner_batch(const ValuationBatch& batch,
                                             const VvcaParams& params) {
  BatchWinnerEngine engine(batch);
  engine.prepare(params);
  const std::size_t n = batch.size.n_bidders;
  std::vector<BundleMask> allocs(static_cast<std::size_t>(batch.count()) * n);
  std::vector<double> maws(batch.count());
  const std::uint64_t total_ops = engine.solve(-1, allocs, maws);
  std::vector<WinnerResult> out(batch.count());
  for (std::size_t p = 0; p < out.size(); ++p) {
    out[p].allocation.bundles.assign(allocs.begin() + p * n, allocs.begin() + (p + 1) * n);
    out[p].max_affine_welfare = maws[p];
    out[p].op_count = total_ops / out.size();  // identical per profile
  }
  return out;
}

}  // namespace vvca::winner
