#include "vvca/odvvca.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "vvca/parallel.hpp"
#include "vvca/sampling.hpp"
#include "vvca/winner.hpp"

namespace vvca::odvvca {

GradientEstimate GradientEstimate::zeros(AuctionSize size) {
  GradientEstimate g;
  g.d_alpha.assign(size.n_bidders, 0.0);
  g.d_lambda.assign(static_cast<std::size_t>(size.n_bidders) * size.bundle_count(), 0.0);
  return g;
}

void TrainConfig::validate() const {
  if (learning_rate < 0.0) throw std::invalid_argument("learning_rate must be >= 0");
  if (iterations < 0) throw std::invalid_argument("iterations must be >= 0");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (smoothing.sigma <= 0.0) throw std::invalid_argument("sigma must be > 0");
  if (smoothing.n_r < 1) throw std::invalid_argument("n_r must be >= 1");
  if (eval_size < 1) throw std::invalid_argument("eval_size must be >= 1");
  if (curve_every < 1) throw std::invalid_argument("curve_every must be >= 1");
  if (max_grad_norm < 0.0) throw std::invalid_argument("max_grad_norm must be >= 0");
}

namespace {

// The n+1 solver passes of one batch plus everything the gradient and
// training metrics need from them.
struct BatchPass {
  std::vector<BundleMask> main_alloc;                 // count x n
  std::vector<double> main_maw;                       // count
  std::vector<std::vector<BundleMask>> removed_alloc; // n of count x n
  std::vector<std::vector<double>> removed_maw;       // n of count
  std::vector<double> welfare;                        // count, per-profile Z
  double z_mean = 0.0;
};

BatchPass run_pass(const winner::BatchWinnerEngine& engine, const ValuationBatch& batch) {
  const int n = batch.size.n_bidders;
  const std::size_t count = batch.profiles.size();
  BatchPass pass;
  pass.main_alloc.resize(count * n);
  pass.main_maw.resize(count);
  engine.solve(-1, pass.main_alloc, pass.main_maw);
  pass.removed_alloc.assign(n, std::vector<BundleMask>(count * n));
  pass.removed_maw.assign(n, std::vector<double>(count));
  for (int i = 0; i < n; ++i) {
    engine.solve(i, pass.removed_alloc[i], pass.removed_maw[i]);
  }
  pass.welfare.resize(count);
  for (std::size_t p = 0; p < count; ++p) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      acc += batch.profiles[p].value(i, pass.main_alloc[p * n + i]);
    }
    pass.welfare[p] = acc;
  }
  pass.z_mean = block_pairwise_sum(pass.welfare.data(), count) / static_cast<double>(count);
  return pass;
}

RawRevenueGradient raw_gradient_from_pass(const ValuationBatch& batch,
                                          const VvcaParams& params, const BatchPass& pass) {
  const int n = batch.size.n_bidders;
  const std::uint32_t full = batch.size.bundle_count();
  const std::size_t count = batch.profiles.size();
  const std::vector<double> w = params.weights();
  std::vector<double> invw(n);
  double invw_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    invw[i] = 1.0 / w[i];
    invw_sum += invw[i];
  }

  RawRevenueGradient g;
  g.d_weights.assign(n, 0.0);
  g.d_lambda.assign(static_cast<std::size_t>(n) * full, 0.0);

  for (std::size_t p = 0; p < count; ++p) {
    const ValuationProfile& prof = batch.profiles[p];
    const BundleMask* a_star = pass.main_alloc.data() + p * n;
    for (int i = 0; i < n; ++i) {
      const BundleMask* a_rm = pass.removed_alloc[i].data() + p * n;
      for (int k = 0; k < n; ++k) {
        g.d_lambda[static_cast<std::size_t>(k) * full + a_rm[k]] += invw[i];
      }
    }
    for (int k = 0; k < n; ++k) {
      g.d_lambda[static_cast<std::size_t>(k) * full + a_star[k]] -= invw_sum;

      double dw = 0.0;
      for (int i = 0; i < n; ++i) {
        if (i == k) continue;
        const BundleMask* a_rm = pass.removed_alloc[i].data() + p * n;
        dw += invw[i] * prof.value(k, a_rm[k]);
      }
      dw -= invw[k] * invw[k] * pass.removed_maw[k][p];
      dw -= invw_sum * prof.value(k, a_star[k]);
      dw += invw[k] * invw[k] * pass.main_maw[p];
      g.d_weights[k] += dw;
    }
  }

  const double inv_count = 1.0 / static_cast<double>(count);
  for (double& v : g.d_weights) v *= inv_count;
  for (double& v : g.d_lambda) v *= inv_count;
  return g;
}

GradientEstimate to_alpha_coords(const RawRevenueGradient& raw, const VvcaParams& params) {
  GradientEstimate g;
  const std::vector<double> w = params.weights();
  g.d_alpha.resize(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) g.d_alpha[k] = w[k] * raw.d_weights[k];
  g.d_lambda = raw.d_lambda;
  return g;
}

// Per-profile welfare of the winning allocations under the engine's
// currently prepared scores, valued at the original (unperturbed)
// valuations.
void winning_welfare(const winner::BatchWinnerEngine& engine, const ValuationBatch& batch,
                     std::span<double> z_out) {
  const int n = batch.size.n_bidders;
  const std::size_t count = batch.profiles.size();
  std::vector<BundleMask> alloc(count * n);
  std::vector<double> maw(count);
  engine.solve(-1, alloc, maw);
  for (std::size_t p = 0; p < count; ++p) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += batch.profiles[p].value(i, alloc[p * n + i]);
    z_out[p] = acc;
  }
}

// Each profile draws its own direction pair from a split stream, so
// the n_r direction samples decorrelate across the batch; the batch
// mean of per-profile smoothings equals the smoothing of the batch
// mean, so the estimator target is unchanged.
GradientEstimate estimate_grad_z_impl(winner::BatchWinnerEngine& engine,
                                      const ValuationBatch& batch, const VvcaParams& params,
                                      const SmoothingConfig& smoothing, Rng& rng,
                                      std::span<const double> baseline_z) {
  if (smoothing.sigma <= 0.0) throw std::invalid_argument("sigma must be > 0");
  if (smoothing.n_r < 1) throw std::invalid_argument("n_r must be >= 1");
  const int n = batch.size.n_bidders;
  const std::size_t count = batch.profiles.size();
  const std::size_t table = params.lambda.size();
  if (baseline_z.size() != count) throw std::invalid_argument("baseline size mismatch");

  GradientEstimate g = GradientEstimate::zeros(batch.size);
  std::vector<double> eps(count * static_cast<std::size_t>(n));
  std::vector<double> delta(count * table);
  std::vector<double> z(count);
  const Rng call_root(rng.next_u64());

  for (int r = 0; r < smoothing.n_r; ++r) {
    const Rng dir_root = call_root.split(r);
    parallel_for(count, 64, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t p = lo; p < hi; ++p) {
        Rng stream = dir_root.split(p);
        for (int i = 0; i < n; ++i) eps[p * n + i] = stream.normal();
        for (std::size_t k = 0; k < table; ++k) delta[p * table + k] = stream.normal();
      }
    });
    engine.prepare_perturbed(params, smoothing.sigma, eps, delta);
    winning_welfare(engine, batch, z);
    for (std::size_t p = 0; p < count; ++p) {
      const double coef = (z[p] - baseline_z[p]) / smoothing.sigma;
      for (int i = 0; i < n; ++i) g.d_alpha[i] += coef * eps[p * n + i];
      const double* d = delta.data() + p * table;
      for (std::size_t k = 0; k < table; ++k) g.d_lambda[k] += coef * d[k];
    }
  }
  const double inv = 1.0 / (static_cast<double>(smoothing.n_r) * static_cast<double>(count));
  for (double& v : g.d_alpha) v *= inv;
  for (double& v : g.d_lambda) v *= inv;
  return g;
}

}  // namespace

RawRevenueGradient grad_F_raw(const ValuationBatch& batch, const VvcaParams& params) {
  if (batch.profiles.empty()) throw std::invalid_argument("empty batch");
  winner::BatchWinnerEngine engine(batch);
  engine.prepare(params);
  const BatchPass pass = run_pass(engine, batch);
  return raw_gradient_from_pass(batch, params, pass);
}

GradientEstimate grad_F(const ValuationBatch& batch, const VvcaParams& params) {
  return to_alpha_coords(grad_F_raw(batch, params), params);
}

GradientEstimate estimate_grad_Z(const ValuationBatch& batch, const VvcaParams& params,
                                 const SmoothingConfig& smoothing, Rng& rng) {
  winner::BatchWinnerEngine engine(batch);
  engine.prepare(params);
  std::vector<double> baseline(batch.profiles.size());
  winning_welfare(engine, batch, baseline);
  return estimate_grad_z_impl(engine, batch, params, smoothing, rng, baseline);
}

GradientEstimate estimate_grad_Z(const ValuationBatch& batch, const VvcaParams& params,
                                 const SmoothingConfig& smoothing, Rng& rng,
                                 std::span<const double> baseline_z) {
  winner::BatchWinnerEngine engine(batch);
  return estimate_grad_z_impl(engine, batch, params, smoothing, rng, baseline_z);
}

EvalSummary evaluate(const VvcaParams& params, const ValuationBatch& batch) {
  if (batch.profiles.empty()) throw std::invalid_argument("empty batch");
  if (batch.size != params.size) throw std::invalid_argument("shape mismatch");
  const std::vector<mechanism::AuctionOutcome> outcomes =
      mechanism::run_auction_batch(batch, params);
  const std::size_t count = outcomes.size();
  const int n = batch.size.n_bidders;
  std::vector<double> r(count), z(count), f(count), pay(count);
  for (std::size_t p = 0; p < count; ++p) {
    r[p] = outcomes[p].revenue;
    z[p] = outcomes[p].welfare_z;
    f[p] = outcomes[p].continuous_f;
  }
  EvalSummary s;
  s.breakdown.r_mean = block_pairwise_sum(r.data(), count) / static_cast<double>(count);
  s.breakdown.z_mean = block_pairwise_sum(z.data(), count) / static_cast<double>(count);
  s.breakdown.f_mean = block_pairwise_sum(f.data(), count) / static_cast<double>(count);
  s.payment_means.resize(n);
  for (int i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < count; ++p) pay[p] = outcomes[p].payments[i];
    s.payment_means[i] = block_pairwise_sum(pay.data(), count) / static_cast<double>(count);
  }
  return s;
}

EvalSummary evaluate_sampled(const VvcaParams& params, SettingId setting, AuctionSize size,
                             std::int64_t count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("count must be >= 1");
  if (size != params.size) throw std::invalid_argument("shape mismatch");
  const int n = size.n_bidders;
  const Rng root(seed);

  double r_sum = 0.0, z_sum = 0.0, f_sum = 0.0;
  std::vector<double> pay_sum(n, 0.0);
  std::int64_t done = 0;
  while (done < count) {
    const std::int64_t chunk = std::min<std::int64_t>(kSumBlock, count - done);
    ValuationBatch batch;
    batch.size = size;
    batch.setting = setting;
    batch.seed = seed;
    batch.profiles.resize(chunk);
    parallel_for(chunk, 64, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t k = lo; k < hi; ++k) {
        Rng stream = root.split(static_cast<std::uint64_t>(done + static_cast<std::int64_t>(k)));
        batch.profiles[k] = sample_profile(setting, size, stream);
      }
    });
    const std::vector<mechanism::AuctionOutcome> outcomes =
        mechanism::run_auction_batch(batch, params);
    std::vector<double> buf(chunk);
    for (std::int64_t p = 0; p < chunk; ++p) buf[p] = outcomes[p].revenue;
    r_sum += block_pairwise_sum(buf.data(), chunk);
    for (std::int64_t p = 0; p < chunk; ++p) buf[p] = outcomes[p].welfare_z;
    z_sum += block_pairwise_sum(buf.data(), chunk);
    for (std::int64_t p = 0; p < chunk; ++p) buf[p] = outcomes[p].continuous_f;
    f_sum += block_pairwise_sum(buf.data(), chunk);
    for (int i = 0; i < n; ++i) {
      for (std::int64_t p = 0; p < chunk; ++p) buf[p] = outcomes[p].payments[i];
      pay_sum[i] += block_pairwise_sum(buf.data(), chunk);
    }
    done += chunk;
  }

  EvalSummary s;
  const double denom = static_cast<double>(count);
  s.breakdown.r_mean = r_sum / denom;
  s.breakdown.z_mean = z_sum / denom;
  s.breakdown.f_mean = f_sum / denom;
  s.payment_means.resize(n);
  for (int i = 0; i < n; ++i) s.payment_means[i] = pay_sum[i] / denom;
  return s;
}

namespace {

// Stream ids inside a training run.
constexpr std::uint64_t kEvalStream = 1;
constexpr std::uint64_t kBatchStream = 2;

double l2_norm(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

}  // namespace

TrainResult train(SettingId setting, AuctionSize size, const TrainConfig& config) {
  config.validate();
  size.validate();
  const auto t_start = std::chrono::steady_clock::now();
  auto wall_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     t_start)
        .count();
  };

  VvcaParams params = VvcaParams::zeros(size);
  const Rng root(config.seed);
  const ValuationBatch eval_batch =
      sample_batch(setting, size, config.eval_size, root.split(kEvalStream).root_seed());
  const Rng batch_stream = root.split(kBatchStream);
  const Rng smooth_root(config.smoothing.seed);

  TrainResult result;
  auto log_curve = [&](int iteration, const GradientEstimate* g) {
    const EvalSummary s = evaluate(params, eval_batch);
    CurveRow row;
    row.iteration = iteration;
    row.r_mean = s.breakdown.r_mean;
    row.z_mean = s.breakdown.z_mean;
    row.f_mean = s.breakdown.f_mean;
    row.grad_norm_alpha = g ? l2_norm(g->d_alpha) : 0.0;
    row.grad_norm_lambda = g ? l2_norm(g->d_lambda) : 0.0;
    row.wall_ms = wall_ms();
    result.report.curve.push_back(row);
    return s.breakdown.r_mean;
  };

  log_curve(0, nullptr);

  // Adam state (used only when config.use_adam).
  std::vector<double> m_a(params.alpha.size(), 0.0), v_a(params.alpha.size(), 0.0);
  std::vector<double> m_l(params.lambda.size(), 0.0), v_l(params.lambda.size(), 0.0);
  const double kBeta1 = config.adam_beta1, kBeta2 = config.adam_beta2;
  constexpr double kAdamEps = 1e-8;

  for (int t = 0; t < config.iterations; ++t) {
    const ValuationBatch batch = sample_batch(setting, size, config.batch_size,
                                              batch_stream.split(t).root_seed());
    const std::uint64_t sweeps_before = winner::instrumentation::sweeps();

    winner::BatchWinnerEngine engine(batch);
    engine.prepare(params);
    const BatchPass pass = run_pass(engine, batch);
    GradientEstimate g = to_alpha_coords(raw_gradient_from_pass(batch, params, pass), params);

    if (config.method == TrainMethod::kOdVvca) {
      Rng dir_rng = smooth_root.split(t);
      const GradientEstimate gz = estimate_grad_z_impl(engine, batch, params, config.smoothing,
                                                       dir_rng, pass.welfare);
      for (std::size_t i = 0; i < g.d_alpha.size(); ++i) g.d_alpha[i] += gz.d_alpha[i];
      for (std::size_t k = 0; k < g.d_lambda.size(); ++k) g.d_lambda[k] += gz.d_lambda[k];
    }

    if (t == 0) {
      result.report.sweeps_per_iteration = winner::instrumentation::sweeps() - sweeps_before;
    }

    if (config.max_grad_norm > 0.0) {
      const double na = l2_norm(g.d_alpha), nl = l2_norm(g.d_lambda);
      const double norm = std::sqrt(na * na + nl * nl);
      if (norm > config.max_grad_norm) {
        const double scale = config.max_grad_norm / norm;
        for (double& x : g.d_alpha) x *= scale;
        for (double& x : g.d_lambda) x *= scale;
      }
    }

    double lr = config.learning_rate;
    if (config.warmup_iterations > 0 && t < config.warmup_iterations) {
      lr *= static_cast<double>(t + 1) / config.warmup_iterations;
    }
    if (config.use_adam) {
      const double bc1 = 1.0 - std::pow(kBeta1, t + 1);
      const double bc2 = 1.0 - std::pow(kBeta2, t + 1);
      for (std::size_t i = 0; i < params.alpha.size(); ++i) {
        m_a[i] = kBeta1 * m_a[i] + (1.0 - kBeta1) * g.d_alpha[i];
        v_a[i] = kBeta2 * v_a[i] + (1.0 - kBeta2) * g.d_alpha[i] * g.d_alpha[i];
        params.alpha[i] += lr * (m_a[i] / bc1) / (std::sqrt(v_a[i] / bc2) + kAdamEps);
      }
      for (std::size_t k = 0; k < params.lambda.size(); ++k) {
        m_l[k] = kBeta1 * m_l[k] + (1.0 - kBeta1) * g.d_lambda[k];
        v_l[k] = kBeta2 * v_l[k] + (1.0 - kBeta2) * g.d_lambda[k] * g.d_lambda[k];
        params.lambda[k] += lr * (m_l[k] / bc1) / (std::sqrt(v_l[k] / bc2) + kAdamEps);
      }
    } else {
      for (std::size_t i = 0; i < params.alpha.size(); ++i) {
        params.alpha[i] += lr * g.d_alpha[i];
      }
      for (std::size_t k = 0; k < params.lambda.size(); ++k) {
        params.lambda[k] += lr * g.d_lambda[k];
      }
    }

    if ((t + 1) % config.curve_every == 0 && t + 1 != config.iterations) {
      log_curve(t + 1, &g);
    }
    if (t + 1 == config.iterations) {
      result.report.final_revenue = log_curve(t + 1, &g);
    }
  }
  if (config.iterations == 0) {
    result.report.final_revenue = result.report.curve.front().r_mean;
  }

  result.params = std::move(params);
  return result;
}

namespace {

struct DefaultRow {
  SettingId setting;
  int n, m;
  double lr, sigma;
  int batch;
};

constexpr double kFallbackLr = 0.001;
constexpr double kFallbackSigma = 0.01;

const DefaultRow kDefaultTable[] = {
    {SettingId::A, 2, 2, 0.01, 0.01, 1024},   {SettingId::A, 2, 5, 0.001, 0.01, 2048},
    {SettingId::A, 3, 10, 0.001, 0.01, 1024}, {SettingId::A, 5, 10, 0.0003, 0.001, 1024},
    {SettingId::A, 10, 5, 0.0003, 0.01, 1024},

    {SettingId::B, 5, 3, 0.001, 0.01, 1024},  {SettingId::B, 3, 10, 0.001, 0.01, 1024},
    {SettingId::B, 5, 10, 0.005, 0.01, 1024}, {SettingId::B, 10, 5, 0.005, 0.01, 1024},
    {SettingId::B, 30, 5, 0.005, 0.01, 1024},

    {SettingId::C, 2, 5, 0.001, 0.01, 2048},  {SettingId::C, 5, 3, 0.001, 0.01, 1024},
    {SettingId::C, 3, 10, 0.001, 0.01, 1024}, {SettingId::C, 5, 10, 0.005, 0.01, 1024},
    {SettingId::C, 10, 5, 0.005, 0.01, 1024}, {SettingId::C, 30, 5, 0.005, 0.01, 1024},

    {SettingId::D, 2, 2, 0.01, 0.01, 1024},   {SettingId::D, 3, 10, 0.001, 0.01, 1024},
    {SettingId::D, 5, 10, 0.0003, 0.01, 1024},{SettingId::D, 10, 5, 0.0003, 0.01, 1024},
};

}  // namespace

DefaultConfig default_train_config(SettingId setting, AuctionSize size) {
  DefaultConfig out;
  out.config.method = TrainMethod::kOdVvca;
  out.config.iterations = 2000;
  out.config.smoothing.n_r = 8;
  for (const DefaultRow& row : kDefaultTable) {
    if (row.setting == setting && row.n == size.n_bidders && row.m == size.n_items) {
      out.config.learning_rate = row.lr;
      out.config.smoothing.sigma = row.sigma;
      out.config.batch_size = row.batch;
      return out;
    }
  }
  out.config.learning_rate = kFallbackLr;
  out.config.smoothing.sigma = kFallbackSigma;
  out.config.batch_size = 1024;
  out.fallback = true;
  return out;
}

}  // namespace vvca::odvvca
