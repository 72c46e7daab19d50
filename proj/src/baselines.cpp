#include "vvca/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "vvca/parallel.hpp"
#include "vvca/sampling.hpp"

namespace vvca::baselines {

VvcaParams vcg_params(AuctionSize size) { return VvcaParams::zeros(size); }

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kSqrt2Pi = 2.50662827463100050242;

// Acklam's rational approximation of the standard normal quantile,
// tightened by one Halley step against erfc.
double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile needs p in (0,1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / kSqrt2) - p;
  const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

// Pool-adjacent-violators: smallest non-decreasing majorant change in
// L2, with uniform weights (the grid is uniform in quantile mass).
void iron_monotone(std::vector<VirtualValuePoint>& grid) {
  struct Pool {
    double sum;
    int count;
  };
  std::vector<Pool> pools;
  pools.reserve(grid.size());
  for (const VirtualValuePoint& p : grid) {
    Pool cur{p.virtual_value, 1};
    while (!pools.empty() &&
           pools.back().sum * cur.count >= cur.sum * pools.back().count) {
      cur.sum += pools.back().sum;
      cur.count += pools.back().count;
      pools.pop_back();
    }
    pools.push_back(cur);
  }
  std::size_t k = 0;
  for (const Pool& pool : pools) {
    const double level = pool.sum / pool.count;
    for (int i = 0; i < pool.count; ++i) grid[k++].virtual_value = level;
  }
}

}  // namespace

double VirtualValueTable::virtual_value(double v) const {
  if (closed_form_uniform) return 2.0 * v - uniform_hi;
  if (v <= grid.front().value) return grid.front().virtual_value;
  if (v >= grid.back().value) return grid.back().virtual_value;
  // Largest grid value <= v.
  auto it = std::upper_bound(grid.begin(), grid.end(), v,
                             [](double x, const VirtualValuePoint& p) { return x < p.value; });
  return std::prev(it)->virtual_value;
}

double VirtualValueTable::inverse_virtual_value(double z) const {
  if (closed_form_uniform) return 0.5 * (z + uniform_hi);
  // Smallest grid value whose ironed virtual value reaches z.
  auto it = std::lower_bound(grid.begin(), grid.end(), z,
                             [](const VirtualValuePoint& p, double x) {
                               return p.virtual_value < x;
                             });
  if (it == grid.end()) return grid.back().value;
  return it->value;
}

VirtualValueTable build_virtual_value(SettingId setting, int bidder, int grid_size) {
  if (setting == SettingId::D) {
    throw std::invalid_argument("per-item decomposition needs an additive setting");
  }
  if (bidder < 0) throw std::invalid_argument("bidder index out of range");
  if (grid_size < 2) throw std::invalid_argument("grid size too small");

  VirtualValueTable t;
  t.bidder = bidder;
  const double hi = static_cast<double>(bidder + 1);

  if (setting == SettingId::A || setting == SettingId::B) {
    // U[0, hi]: phi(v) = v - (1 - v/hi) hi = 2v - hi, already monotone.
    t.closed_form_uniform = true;
    t.uniform_hi = setting == SettingId::A ? 1.0 : hi;
    t.grid.resize(grid_size);
    for (int k = 0; k < grid_size; ++k) {
      const double v = t.uniform_hi * (k + 0.5) / grid_size;
      t.grid[k] = {v, 2.0 * v - t.uniform_hi};
    }
    t.reserve = 0.5 * t.uniform_hi;
    return t;
  }

  // Lognormal(0, sigma^2 = 1/i^2) on a quantile grid.
  const double sigma = 1.0 / hi;
  t.grid.resize(grid_size);
  for (int k = 0; k < grid_size; ++k) {
    const double p = (k + 0.5) / grid_size;
    const double v = std::exp(sigma * norm_quantile(p));
    const double pdf =
        std::exp(-0.5 * std::pow(std::log(v) / sigma, 2)) / (v * sigma * kSqrt2Pi);
    t.grid[k] = {v, v - (1.0 - p) / pdf};
  }
  iron_monotone(t.grid);
  const auto it = std::lower_bound(
      t.grid.begin(), t.grid.end(), 0.0,
      [](const VirtualValuePoint& p, double x) { return p.virtual_value < x; });
  t.reserve = it == t.grid.end() ? t.grid.back().value : it->value;
  return t;
}

ItemOutcome item_myerson_outcome(std::span<const double> item_values,
                                 std::span<const VirtualValueTable> tables) {
  if (item_values.size() != tables.size()) {
    throw std::invalid_argument("values/tables size mismatch");
  }
  ItemOutcome out;
  double best_vv = 0.0;
  for (std::size_t i = 0; i < item_values.size(); ++i) {
    const double vv = tables[i].virtual_value(item_values[i]);
    if (vv >= 0.0 && (out.winner < 0 || vv > best_vv)) {
      out.winner = static_cast<int>(i);
      best_vv = vv;
    }
  }
  if (out.winner < 0) return out;
  double threshold = 0.0;
  for (std::size_t i = 0; i < item_values.size(); ++i) {
    if (static_cast<int>(i) == out.winner) continue;
    threshold = std::max(threshold, tables[i].virtual_value(item_values[i]));
  }
  out.payment = tables[out.winner].inverse_virtual_value(threshold);
  return out;
}

namespace {

double profile_myerson_revenue(const ValuationProfile& profile,
                               std::span<const VirtualValueTable> tables) {
  const int n = profile.size.n_bidders;
  double total = 0.0;
  std::vector<double> item_values(n);
  for (int j = 0; j < profile.size.n_items; ++j) {
    for (int i = 0; i < n; ++i) item_values[i] = profile.value(i, 1u << j);
    total += item_myerson_outcome(item_values, tables).payment;
  }
  return total;
}

std::vector<VirtualValueTable> tables_for(SettingId setting, int n_bidders) {
  std::vector<VirtualValueTable> tables;
  tables.reserve(n_bidders);
  for (int i = 0; i < n_bidders; ++i) tables.push_back(build_virtual_value(setting, i));
  return tables;
}

}  // namespace

double item_myerson_revenue(const ValuationBatch& batch) {
  if (!setting_is_additive(batch.setting)) {
    throw std::invalid_argument("item decomposition undefined for non-additive batches");
  }
  if (batch.profiles.empty()) throw std::invalid_argument("empty batch");
  const std::vector<VirtualValueTable> tables = tables_for(batch.setting, batch.size.n_bidders);
  std::vector<double> rev(batch.profiles.size());
  parallel_for(batch.profiles.size(), 256, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      rev[p] = profile_myerson_revenue(batch.profiles[p], tables);
    }
  });
  return block_pairwise_sum(rev.data(), rev.size()) / static_cast<double>(rev.size());
}

double item_myerson_revenue_sampled(SettingId setting, AuctionSize size, std::int64_t count,
                                    std::uint64_t seed) {
  if (!setting_is_additive(setting)) {
    throw std::invalid_argument("item decomposition undefined for non-additive settings");
  }
  if (count < 1) throw std::invalid_argument("count must be >= 1");
  const std::vector<VirtualValueTable> tables = tables_for(setting, size.n_bidders);
  const Rng root(seed);
  double sum = 0.0;
  std::int64_t done = 0;
  std::vector<double> rev(kSumBlock);
  while (done < count) {
    const std::int64_t chunk = std::min<std::int64_t>(kSumBlock, count - done);
    parallel_for(chunk, 64, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t k = lo; k < hi; ++k) {
        Rng stream = root.split(static_cast<std::uint64_t>(done + static_cast<std::int64_t>(k)));
        const ValuationProfile p = sample_profile(setting, size, stream);
        rev[k] = profile_myerson_revenue(p, tables);
      }
    });
    sum += block_pairwise_sum(rev.data(), chunk);
    done += chunk;
  }
  return sum / static_cast<double>(count);
}

odvvca::RawRevenueGradient bbbvvca_gradient(const ValuationBatch& batch,
                                            const VvcaParams& params) {
  return odvvca::grad_F_raw(batch, params);
}

odvvca::TrainResult bbbvvca_train(SettingId setting, AuctionSize size,
                                  const odvvca::TrainConfig& config) {
  config.validate();
  size.validate();
  const auto t_start = std::chrono::steady_clock::now();
  auto wall_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     t_start)
        .count();
  };

  VvcaParams params = VvcaParams::zeros(size);
  std::vector<double> weights(size.n_bidders, 1.0);
  const Rng root(config.seed);
  const ValuationBatch eval_batch =
      sample_batch(setting, size, config.eval_size, root.split(1).root_seed());
  const Rng batch_stream = root.split(2);

  odvvca::TrainResult result;
  auto log_curve = [&](int iteration, double gn_w, double gn_l) {
    const odvvca::EvalSummary s = odvvca::evaluate(params, eval_batch);
    odvvca::CurveRow row;
    row.iteration = iteration;
    row.r_mean = s.breakdown.r_mean;
    row.z_mean = s.breakdown.z_mean;
    row.f_mean = s.breakdown.f_mean;
    row.grad_norm_alpha = gn_w;  // raw-weight norm for this baseline
    row.grad_norm_lambda = gn_l;
    row.wall_ms = wall_ms();
    result.report.curve.push_back(row);
    return s.breakdown.r_mean;
  };

  log_curve(0, 0.0, 0.0);

  for (int t = 0; t < config.iterations; ++t) {
    const ValuationBatch batch = sample_batch(setting, size, config.batch_size,
                                              batch_stream.split(t).root_seed());
    const odvvca::RawRevenueGradient g = odvvca::grad_F_raw(batch, params);
    for (int i = 0; i < size.n_bidders; ++i) {
      weights[i] = std::max(weights[i] + config.learning_rate * g.d_weights[i], kBbbMinWeight);
      params.alpha[i] = std::log(weights[i]);
    }
    for (std::size_t k = 0; k < params.lambda.size(); ++k) {
      params.lambda[k] += config.learning_rate * g.d_lambda[k];
    }
    double gn_w = 0.0, gn_l = 0.0;
    for (double x : g.d_weights) gn_w += x * x;
    for (double x : g.d_lambda) gn_l += x * x;
    if ((t + 1) % config.curve_every == 0 || t + 1 == config.iterations) {
      const double r = log_curve(t + 1, std::sqrt(gn_w), std::sqrt(gn_l));
      if (t + 1 == config.iterations) result.report.final_revenue = r;
    }
  }
  if (config.iterations == 0) {
    result.report.final_revenue = result.report.curve.front().r_mean;
  }
  result.params = std::move(params);
  return result;
}

}  // namespace vvca::baselines
