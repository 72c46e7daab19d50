#pragma once

#include <cstdint>
#include <vector>

#include "vvca/domain.hpp"
#include "vvca/mechanism.hpp"
#include "vvca/rng.hpp"

namespace vvca::odvvca {

struct SmoothingConfig {
  double sigma = 0.01;
  int n_r = 8;
  std::uint64_t seed = 0;
};

struct GradientEstimate {
  std::vector<double> d_alpha;   // n
  std::vector<double> d_lambda;  // n x 2^m

  static GradientEstimate zeros(AuctionSize size);
};

/// Gradient of the continuous component in raw (w, lambda) coordinates;
/// the log-weight form chains through d/d alpha_k = w_k d/d w_k.
struct RawRevenueGradient {
  std::vector<double> d_weights;
  std::vector<double> d_lambda;
};

enum class TrainMethod { kOdVvca, kFoVvca };

struct TrainConfig {
  TrainMethod method = TrainMethod::kOdVvca;
  double learning_rate = 0.001;
  int iterations = 2000;
  int batch_size = 1024;
  SmoothingConfig smoothing;
  int eval_size = 1 << 16;
  std::uint64_t seed = 0;
  int curve_every = 10;
  bool use_adam = true;         // adaptive moments; false = plain ascent
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  int warmup_iterations = 0;    // linear learning-rate ramp
  double max_grad_norm = 0.0;   // 0 = no clipping

  void validate() const;
};

struct CurveRow {
  int iteration = 0;
  double r_mean = 0.0;
  double z_mean = 0.0;
  double f_mean = 0.0;
  double grad_norm_alpha = 0.0;
  double grad_norm_lambda = 0.0;
  double wall_ms = 0.0;
};

struct TrainReport {
  std::vector<CurveRow> curve;
  double final_revenue = 0.0;
  std::uint64_t sweeps_per_iteration = 0;  // instrumented on the first iteration
};

struct TrainResult {
  VvcaParams params;
  TrainReport report;
};

struct EvalSummary {
  mechanism::RevenueBreakdown breakdown;
  std::vector<double> payment_means;  // per bidder
};

/// Almost-everywhere gradient of the batch-mean continuous component F:
/// solve the n+1 argmax allocations per profile, hold them fixed, and
/// differentiate the payment expressions analytically. n+1 sweeps.
GradientEstimate grad_F(const ValuationBatch& batch, const VvcaParams& params);
RawRevenueGradient grad_F_raw(const ValuationBatch& batch, const VvcaParams& params);

/// Monte-Carlo gradient of the Gaussian-smoothed welfare component:
/// n_r direction rounds, one winner sweep each, averaging
/// (Z_perturbed - Z_base) / sigma times the direction. Every profile
/// draws its own (eps, delta) pair per round from a split stream;
/// since smoothing commutes with the batch mean, the estimate stays
/// unbiased for the gradient of the smoothed batch welfare while the
/// direction samples decorrelate across profiles. The overload without
/// `baseline_z` (per-profile winning welfare at the unperturbed
/// parameters) spends one extra sweep computing it; training reuses
/// the main pass so an iteration costs exactly (n+1) + n_r sweeps.
GradientEstimate estimate_grad_Z(const ValuationBatch& batch, const VvcaParams& params,
                                 const SmoothingConfig& smoothing, Rng& rng);
GradientEstimate estimate_grad_Z(const ValuationBatch& batch, const VvcaParams& params,
                                 const SmoothingConfig& smoothing, Rng& rng,
                                 std::span<const double> baseline_z);

/// Gradient ascent from the VCG start (alpha = 0, lambda = 0), fresh
/// batch per iteration; FO-VVCA ascends grad_F alone, OD-VVCA adds the
/// smoothed-Z estimate. The held-out curve batch is fixed per run.
TrainResult train(SettingId setting, AuctionSize size, const TrainConfig& config);

EvalSummary evaluate(const VvcaParams& params, const ValuationBatch& batch);

/// Streaming evaluation over `count` freshly sampled profiles in fixed
/// 1024-profile chunks; identical result for any worker count.
EvalSummary evaluate_sampled(const VvcaParams& params, SettingId setting, AuctionSize size,
                             std::int64_t count, std::uint64_t seed);

struct DefaultConfig {
  TrainConfig config;
  bool fallback = false;  // true when no per-setting entry exists
};

/// Per-setting hyperparameter defaults (learning rate, sigma, batch
/// size; n_r = 8, 2000 iterations); unlisted sizes fall back to
/// lr 0.001, sigma 0.01, batch 1024.
DefaultConfig default_train_config(SettingId setting, AuctionSize size);

}  // namespace vvca::odvvca
