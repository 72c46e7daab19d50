#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vvca/harness.hpp"
#include "vvca/kernels/dp_kernels.hpp"
#include "vvca/parallel.hpp"
#include "vvca/sampling.hpp"

namespace vvca::harness {

namespace {

struct Sizes {
  int oracle_per_setting;
  int structural;
  int dsic_pairs;
  int op_count_max_n;
  int op_count_max_m;
  int myerson_samples;
  int continuity_trials;
};

Sizes sizes_for(VerifyScale scale) {
  if (scale == VerifyScale::kQuick) return {100, 200, 500, 4, 6, 200, 200};
  return {1000, 2000, 10000, 6, 10, 2000, 1000};
}

using WinnerFn =
    std::function<winner::WinnerResult(const ValuationProfile&, const VvcaParams&)>;
using OutcomeFn = std::function<void(mechanism::AuctionOutcome&)>;

VvcaParams random_params(AuctionSize size, Rng& rng, double alpha_range = 1.0,
                         double lambda_range = 1.0) {
  VvcaParams p = VvcaParams::zeros(size);
  for (double& a : p.alpha) a = rng.uniform(-alpha_range, alpha_range);
  for (double& l : p.lambda) l = rng.uniform(-lambda_range, lambda_range);
  return p;
}

SettingId setting_of(int idx) {
  constexpr SettingId kAll[] = {SettingId::A, SettingId::B, SettingId::C, SettingId::D};
  return kAll[idx % 4];
}

bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// --- individual checks -----------------------------------------------------

CheckResult check_kernel_equivalence(Rng rng) {
  CheckResult c{"kernel_equivalence", true, ""};
  const auto variants = kernels::available_kernels();
  std::string names;
  for (const auto* k : variants) names += std::string(k->name) + " ";
  const kernels::DpLayerKernels& ref = kernels::scalar_kernels();
  constexpr int kL = kernels::kLanes;

  for (int trial = 0; trial < 24 && c.passed; ++trial) {
    const int m = 1 + static_cast<int>(rng.next_u64() % 6);
    const std::uint32_t full = 1u << m;
    std::vector<double> prev(full * kL), score(full * kL), lam(full);
    for (double& x : prev) x = rng.uniform(-1.0, 1.0);
    for (double& x : score) x = rng.uniform(-1.0, 1.0);
    for (double& x : lam) x = rng.uniform(-1.0, 1.0);
    // Quantized inputs on some trials so exact ties are exercised.
    if (trial % 3 == 0) {
      for (double& x : prev) x = std::round(x * 4.0) / 4.0;
      for (double& x : score) x = std::round(x * 4.0) / 4.0;
      for (double& x : lam) x = std::round(x * 4.0) / 4.0;
    }

    std::vector<double> maw_ref(full * kL), maw_alt(full * kL);
    std::vector<std::int64_t> ab_ref(full * kL), ab_alt(full * kL);
    for (const auto* alt : variants) {
      ref.layer_vec(prev.data(), score.data(), m, maw_ref.data(), ab_ref.data());
      alt->layer_vec(prev.data(), score.data(), m, maw_alt.data(), ab_alt.data());
      if (std::memcmp(maw_ref.data(), maw_alt.data(), maw_ref.size() * 8) != 0 ||
          std::memcmp(ab_ref.data(), ab_alt.data(), ab_ref.size() * 8) != 0) {
        c.passed = false;
        c.detail = std::string("layer_vec mismatch: ") + alt->name;
        break;
      }
      ref.layer_bcast(prev.data(), lam.data(), m, maw_ref.data(), ab_ref.data());
      alt->layer_bcast(prev.data(), lam.data(), m, maw_alt.data(), ab_alt.data());
      if (std::memcmp(maw_ref.data(), maw_alt.data(), maw_ref.size() * 8) != 0 ||
          std::memcmp(ab_ref.data(), ab_alt.data(), ab_ref.size() * 8) != 0) {
        c.passed = false;
        c.detail = std::string("layer_bcast mismatch: ") + alt->name;
        break;
      }
      ref.init_vec(score.data(), m, maw_ref.data());
      alt->init_vec(score.data(), m, maw_alt.data());
      if (std::memcmp(maw_ref.data(), maw_alt.data(), maw_ref.size() * 8) != 0) {
        c.passed = false;
        c.detail = std::string("init_vec mismatch: ") + alt->name;
        break;
      }
      ref.init_bcast(lam.data(), m, maw_ref.data());
      alt->init_bcast(lam.data(), m, maw_alt.data());
      if (std::memcmp(maw_ref.data(), maw_alt.data(), maw_ref.size() * 8) != 0) {
        c.passed = false;
        c.detail = std::string("init_bcast mismatch: ") + alt->name;
        break;
      }
    }
  }
  if (c.passed) c.detail = "variants: " + names;
  return c;
}

CheckResult check_oracle_equivalence(const Sizes& sz, Rng rng, const WinnerFn& winner_fn) {
  CheckResult c{"oracle_equivalence", true, ""};
  int checked = 0;
  double max_rel = 0.0;
  for (int s = 0; s < 4 && c.passed; ++s) {
    const SettingId setting = setting_of(s);
    for (int t = 0; t < sz.oracle_per_setting && c.passed; ++t) {
      Rng trial = rng.split(s * 100000 + t);
      const AuctionSize size{1 + static_cast<int>(trial.next_u64() % 4),
                             1 + static_cast<int>(trial.next_u64() % 4)};
      ValuationProfile profile = sample_profile(setting, size, trial);
      VvcaParams params = random_params(size, trial);
      // Quarter-grid cases make exact welfare ties common, exercising
      // the shared tie-break for real.
      const bool quantized = t % 4 == 0;
      if (quantized) {
        for (double& v : profile.values) v = std::round(v * 2.0) / 2.0;
        for (double& a : params.alpha) a = 0.0;
        for (double& l : params.lambda) l = std::round(l * 2.0) / 2.0;
        profile.additive = false;
      }
      const winner::WinnerResult dp = winner_fn(profile, params);
      const winner::WinnerResult bf = winner::brute_force_winner(profile, params);
      const double rel = std::abs(dp.max_affine_welfare - bf.max_affine_welfare) /
                         std::max(1.0, std::abs(bf.max_affine_welfare));
      max_rel = std::max(max_rel, rel);
      if (rel > 1e-12) {
        c.passed = false;
        c.detail = "welfare mismatch, rel err " + std::to_string(rel);
      } else if (dp.allocation != bf.allocation) {
        c.passed = false;
        c.detail = "allocation mismatch (tie-break divergence)";
      }
      ++checked;
    }
  }
  if (c.passed) {
    std::ostringstream os;
    os << checked << " instances, max rel err " << max_rel;
    c.detail = os.str();
  }
  return c;
}

CheckResult check_batch_vs_sequential(Rng rng) {
  CheckResult c{"batch_vs_sequential", true, ""};
  const AuctionSize size{3, 4};
  const ValuationBatch batch = sample_batch(SettingId::B, size, 64, rng.next_u64());
  Rng prng = rng.split(7);
  const VvcaParams params = random_params(size, prng);

  const int saved_threads = thread_count();
  std::vector<std::vector<winner::WinnerResult>> runs;
  for (int threads : {1, 3}) {
    set_thread_count(threads);
    runs.push_back(winner::solve_winner_batch(batch, params));
  }
  set_thread_count(saved_threads);

  for (int p = 0; p < batch.count() && c.passed; ++p) {
    const winner::WinnerResult single = winner::solve_winner(batch.profiles[p], params);
    for (const auto& run : runs) {
      if (std::memcmp(&run[p].max_affine_welfare, &single.max_affine_welfare, 8) != 0 ||
          run[p].allocation != single.allocation || run[p].op_count != single.op_count) {
        c.passed = false;
        c.detail = "batch result differs from sequential at profile " + std::to_string(p);
        break;
      }
    }
  }
  return c;
}

CheckResult check_structural_identities(const Sizes& sz, Rng rng,
                                        const OutcomeFn& transform) {
  CheckResult c{"structural_identities", true, ""};
  for (int t = 0; t < sz.structural && c.passed; ++t) {
    Rng trial = rng.split(t);
    const SettingId setting = setting_of(t);
    const AuctionSize size{1 + static_cast<int>(trial.next_u64() % 3),
                           1 + static_cast<int>(trial.next_u64() % 3)};
    const ValuationProfile profile = sample_profile(setting, size, trial);
    const VvcaParams params = random_params(size, trial);
    mechanism::AuctionOutcome out = mechanism::run_auction(profile, params);
    transform(out);

    double pay_sum = 0.0;
    for (double p : out.payments) pay_sum += p;
    if (!rel_close(out.revenue, pay_sum, 1e-9)) {
      c.passed = false;
      c.detail = "revenue != sum of payments";
      break;
    }
    if (!rel_close(out.revenue, out.welfare_z + out.continuous_f, 1e-9)) {
      c.passed = false;
      c.detail = "revenue != Z + F";
      break;
    }
    // Scale invariance of outcomes under (w, lambda) -> (c w, c lambda).
    for (double scale : {0.5, 2.0, 10.0}) {
      VvcaParams scaled = params;
      const double log_c = std::log(scale);
      for (double& a : scaled.alpha) a += log_c;
      for (double& l : scaled.lambda) l *= scale;
      const mechanism::AuctionOutcome out2 = mechanism::run_auction(profile, scaled);
      if (!rel_close(out.revenue, out2.revenue, 1e-9)) {
        c.passed = false;
        c.detail = "revenue not scale-invariant at c=" + std::to_string(scale);
        break;
      }
      for (int i = 0; i < size.n_bidders; ++i) {
        if (!rel_close(out.payments[i], out2.payments[i], 1e-9)) {
          c.passed = false;
          c.detail = "payment not scale-invariant at c=" + std::to_string(scale);
          break;
        }
      }
      if (!c.passed) break;
    }
  }
  return c;
}

CheckResult check_ir_and_payment_sign(const Sizes& sz, Rng rng, const OutcomeFn& transform) {
  CheckResult c{"ir_and_payment_sign", true, ""};
  for (int t = 0; t < sz.structural && c.passed; ++t) {
    Rng trial = rng.split(t);
    const SettingId setting = setting_of(t);
    const AuctionSize size{1 + static_cast<int>(trial.next_u64() % 3),
                           1 + static_cast<int>(trial.next_u64() % 3)};
    const ValuationProfile profile = sample_profile(setting, size, trial);
    const VvcaParams params = random_params(size, trial);
    mechanism::AuctionOutcome out = mechanism::run_auction(profile, params);
    transform(out);
    for (int i = 0; i < size.n_bidders; ++i) {
      if (out.payments[i] < -1e-12) {
        c.passed = false;
        c.detail = "negative payment " + std::to_string(out.payments[i]);
        break;
      }
      const double u = profile.value(i, out.allocation.bundles[i]) - out.payments[i];
      if (u < -1e-9) {
        c.passed = false;
        c.detail = "truthful utility " + std::to_string(u);
        break;
      }
    }
  }
  return c;
}

CheckResult check_dsic_sampling(const Sizes& sz, Rng rng) {
  CheckResult c{"dsic_sampling", true, ""};
  double worst_gain = 0.0;
  for (int t = 0; t < sz.dsic_pairs && c.passed; ++t) {
    Rng trial = rng.split(t);
    const AuctionSize size = t % 2 == 0 ? AuctionSize{2, 3} : AuctionSize{3, 3};
    const ValuationProfile truth = sample_profile(SettingId::A, size, trial);
    const VvcaParams params = random_params(size, trial);
    const int bidder = static_cast<int>(trial.next_u64() % size.n_bidders);
    const double truthful = mechanism::utility(truth, truth, params, bidder);

    ValuationProfile misreport = truth;
    if (t % 2 == 0) {
      // Full redraw of the bidder's row.
      Rng redraw = trial.split(1);
      const ValuationProfile other = sample_profile(SettingId::A, size, redraw);
      const std::uint32_t full = size.bundle_count();
      std::copy_n(other.values.begin() + static_cast<std::size_t>(bidder) * full, full,
                  misreport.values.begin() + static_cast<std::size_t>(bidder) * full);
    } else {
      // Single-entry perturbation of a non-empty bundle value.
      const std::uint32_t bundle =
          1 + static_cast<std::uint32_t>(trial.next_u64() % (size.bundle_count() - 1));
      misreport.value(bidder, bundle) =
          std::max(0.0, misreport.value(bidder, bundle) * trial.uniform(0.0, 2.0));
      misreport.additive = false;
    }
    const double gained = mechanism::utility(truth, misreport, params, bidder) - truthful;
    worst_gain = std::max(worst_gain, gained);
    if (gained > 1e-9) {
      c.passed = false;
      c.detail = "misreport gained " + std::to_string(gained);
    }
  }
  if (c.passed) {
    std::ostringstream os;
    os << sz.dsic_pairs << " pairs, max gain " << worst_gain;
    c.detail = os.str();
  }
  return c;
}

CheckResult check_vcg_reduction(const Sizes& sz, Rng rng) {
  CheckResult c{"vcg_reduction", true, ""};
  for (int t = 0; t < sz.structural / 2 && c.passed; ++t) {
    Rng trial = rng.split(t);
    const SettingId setting = t % 2 == 0 ? SettingId::A : SettingId::B;
    const AuctionSize size{2 + static_cast<int>(trial.next_u64() % 3),
                           1 + static_cast<int>(trial.next_u64() % 4)};
    const ValuationProfile profile = sample_profile(setting, size, trial);
    const VvcaParams vcg = baselines::vcg_params(size);
    const mechanism::AuctionOutcome out = mechanism::run_auction(profile, vcg);
    // Per-item second-price reference for additive values.
    for (int i = 0; i < size.n_bidders && c.passed; ++i) {
      double expected = 0.0;
      for (int j = 0; j < size.n_items; ++j) {
        if (!(out.allocation.bundles[i] & (1u << j))) continue;
        double second = 0.0;
        for (int k = 0; k < size.n_bidders; ++k) {
          if (k != i) second = std::max(second, profile.value(k, 1u << j));
        }
        expected += second;
      }
      if (!rel_close(out.payments[i], expected, 1e-9)) {
        c.passed = false;
        c.detail = "VCG payment differs from per-item second price";
      }
    }
  }
  return c;
}

CheckResult check_op_count(const Sizes& sz, Rng rng) {
  CheckResult c{"op_count_formula", true, ""};
  for (int n = 1; n <= sz.op_count_max_n && c.passed; ++n) {
    for (int m = 1; m <= sz.op_count_max_m && c.passed; ++m) {
      Rng trial = rng.split(n * 100 + m);
      const AuctionSize size{n, m};
      const ValuationProfile profile = sample_profile(SettingId::A, size, trial);
      const VvcaParams params = random_params(size, trial);
      const std::uint64_t expected = winner::dp_operation_count(size);
      const winner::WinnerResult single = winner::solve_winner(profile, params);
      if (single.op_count != expected) {
        c.passed = false;
        c.detail = "single-solve op count mismatch at n=" + std::to_string(n) +
                   " m=" + std::to_string(m);
        break;
      }
      ValuationBatch batch;
      batch.size = size;
      batch.setting = SettingId::A;
      batch.profiles.assign(3, profile);
      const auto results = winner::solve_winner_batch(batch, params);
      for (const auto& r : results) {
        if (r.op_count != expected) {
          c.passed = false;
          c.detail = "batched op count mismatch at n=" + std::to_string(n) +
                     " m=" + std::to_string(m);
          break;
        }
      }
    }
  }
  return c;
}

CheckResult check_sweep_accounting(Rng rng) {
  CheckResult c{"sweep_accounting", true, ""};
  const AuctionSize size{2, 2};
  const ValuationBatch batch = sample_batch(SettingId::A, size, 64, rng.next_u64());
  const VvcaParams params = VvcaParams::zeros(size);
  odvvca::SmoothingConfig smoothing;
  smoothing.n_r = 8;

  winner::instrumentation::reset();
  odvvca::grad_F(batch, params);
  const std::uint64_t after_f = winner::instrumentation::sweeps();
  Rng dir = rng.split(3);
  const std::vector<double> baseline(batch.profiles.size(), 0.0);
  odvvca::estimate_grad_Z(batch, params, smoothing, dir, baseline);
  const std::uint64_t after_z = winner::instrumentation::sweeps();

  const std::uint64_t n_plus_1 = size.n_bidders + 1;
  if (after_f != n_plus_1) {
    c.passed = false;
    c.detail = "grad_F used " + std::to_string(after_f) + " sweeps, expected " +
               std::to_string(n_plus_1);
    return c;
  }
  if (after_z - after_f != static_cast<std::uint64_t>(smoothing.n_r)) {
    c.passed = false;
    c.detail = "estimator used " + std::to_string(after_z - after_f) + " sweeps, expected " +
               std::to_string(smoothing.n_r);
    return c;
  }

  odvvca::TrainConfig tc;
  tc.method = odvvca::TrainMethod::kOdVvca;
  tc.iterations = 2;
  tc.batch_size = 32;
  tc.eval_size = 32;
  tc.curve_every = 1000;
  tc.seed = rng.next_u64();
  tc.smoothing = smoothing;
  const odvvca::TrainResult r = odvvca::train(SettingId::A, size, tc);
  if (r.report.sweeps_per_iteration != n_plus_1 + smoothing.n_r) {
    c.passed = false;
    c.detail = "training iteration used " + std::to_string(r.report.sweeps_per_iteration) +
               " sweeps, expected " + std::to_string(n_plus_1 + smoothing.n_r);
    return c;
  }
  c.detail = "one iteration = (n+1) + n_r sweeps";
  return c;
}

CheckResult check_reproducibility(Rng rng) {
  CheckResult c{"reproducibility", true, ""};
  const AuctionSize size{3, 4};
  const std::uint64_t seed = rng.next_u64();
  const ValuationBatch a = sample_batch(SettingId::C, size, 32, seed);
  const ValuationBatch b = sample_batch(SettingId::C, size, 32, seed);
  const ValuationBatch d = sample_batch(SettingId::C, size, 32, seed + 1);
  for (int p = 0; p < 32; ++p) {
    if (std::memcmp(a.profiles[p].values.data(), b.profiles[p].values.data(),
                    a.profiles[p].values.size() * 8) != 0) {
      c.passed = false;
      c.detail = "same seed produced different batches";
      return c;
    }
  }
  bool any_diff = false;
  for (int p = 0; p < 32 && !any_diff; ++p) {
    any_diff = std::memcmp(a.profiles[p].values.data(), d.profiles[p].values.data(),
                           a.profiles[p].values.size() * 8) != 0;
  }
  if (!any_diff) {
    c.passed = false;
    c.detail = "adjacent seeds produced identical batches";
    return c;
  }

  const auto tmp = std::filesystem::temp_directory_path();
  const auto f1 = tmp / "vvca_verify_batch1.bin";
  const auto f2 = tmp / "vvca_verify_batch2.bin";
  write_batch(a, f1);
  write_batch(b, f2);
  std::ifstream s1(f1, std::ios::binary), s2(f2, std::ios::binary);
  std::stringstream b1, b2;
  b1 << s1.rdbuf();
  b2 << s2.rdbuf();
  if (b1.str() != b2.str()) {
    c.passed = false;
    c.detail = "batch files not byte-identical";
  }
  std::filesystem::remove(f1);
  std::filesystem::remove(f2);
  return c;
}

CheckResult check_myerson(const Sizes& sz, Rng rng) {
  CheckResult c{"myerson_properties", true, ""};
  for (const SettingId setting : {SettingId::A, SettingId::B, SettingId::C}) {
    for (int i = 0; i < 3 && c.passed; ++i) {
      const auto table = baselines::build_virtual_value(setting, i, 2048);
      for (std::size_t k = 1; k < table.grid.size(); ++k) {
        if (table.grid[k].value <= table.grid[k - 1].value) {
          c.passed = false;
          c.detail = "grid values not strictly ascending";
          break;
        }
        if (table.grid[k].virtual_value < table.grid[k - 1].virtual_value) {
          c.passed = false;
          c.detail = "ironed virtual values decrease";
          break;
        }
      }
      if (!c.passed) break;
      if (table.virtual_value(table.reserve) < -1e-12) {
        c.passed = false;
        c.detail = "reserve below the zero crossing";
      }
    }
  }
  if (!c.passed) return c;

  // Per-item DSIC sampling and threshold monotonicity.
  const int n = 3;
  for (const SettingId setting : {SettingId::A, SettingId::C}) {
    std::vector<baselines::VirtualValueTable> tables;
    for (int i = 0; i < n; ++i) tables.push_back(baselines::build_virtual_value(setting, i));
    for (int t = 0; t < sz.myerson_samples && c.passed; ++t) {
      Rng trial = rng.split(t);
      std::vector<double> values(n);
      for (int i = 0; i < n; ++i) {
        values[i] = setting == SettingId::A ? trial.uniform()
                                            : std::exp(trial.normal() / (i + 1));
      }
      const auto outcome = baselines::item_myerson_outcome(values, tables);
      const int bidder = static_cast<int>(trial.next_u64() % n);
      const double truthful_u =
          outcome.winner == bidder ? values[bidder] - outcome.payment : 0.0;
      std::vector<double> misreport = values;
      misreport[bidder] = std::max(0.0, values[bidder] * trial.uniform(0.0, 3.0));
      const auto out2 = baselines::item_myerson_outcome(misreport, tables);
      const double lying_u = out2.winner == bidder ? values[bidder] - out2.payment : 0.0;
      if (lying_u > truthful_u + 1e-3) {
        c.passed = false;
        c.detail = "per-item misreport gained " + std::to_string(lying_u - truthful_u);
      }
      if (outcome.winner >= 0) {
        std::vector<double> raised = values;
        raised[outcome.winner] += trial.uniform(0.0, 2.0);
        const auto out3 = baselines::item_myerson_outcome(raised, tables);
        if (out3.winner != outcome.winner ||
            std::abs(out3.payment - outcome.payment) > 1e-9) {
          c.passed = false;
          c.detail = "raising the winner's value changed the outcome";
        }
      }
    }
  }
  return c;
}

CheckResult check_f_continuity(const Sizes& sz, Rng rng) {
  CheckResult c{"f_lambda_segments", true, ""};
  int usable = 0;
  for (int t = 0; t < sz.continuity_trials && c.passed; ++t) {
    Rng trial = rng.split(t);
    const AuctionSize size{2, 3};
    const ValuationProfile profile = sample_profile(SettingId::A, size, trial);
    VvcaParams p1 = random_params(size, trial);
    VvcaParams p2 = p1;
    for (double& l : p2.lambda) l += trial.uniform(-0.01, 0.01);
    VvcaParams mid = p1;
    for (std::size_t k = 0; k < mid.lambda.size(); ++k) {
      mid.lambda[k] = 0.5 * (p1.lambda[k] + p2.lambda[k]);
    }

    // Keep the case only when every argmax allocation agrees across the
    // three points; F is exactly linear in lambda there.
    auto allocations = [&](const VvcaParams& p) {
      std::vector<winner::Allocation> out;
      out.push_back(winner::solve_winner(profile, p).allocation);
      for (int i = 0; i < size.n_bidders; ++i) {
        out.push_back(winner::solve_winner(profile, p, i).allocation);
      }
      return out;
    };
    const auto a1 = allocations(p1);
    if (a1 != allocations(p2) || a1 != allocations(mid)) continue;
    ++usable;

    const double f1 = mechanism::run_auction(profile, p1).continuous_f;
    const double f2 = mechanism::run_auction(profile, p2).continuous_f;
    const double fm = mechanism::run_auction(profile, mid).continuous_f;
    if (!rel_close(fm, 0.5 * (f1 + f2), 1e-9)) {
      c.passed = false;
      c.detail = "F not linear on a lambda segment";
    }
  }
  if (c.passed) {
    if (usable < sz.continuity_trials / 4) {
      c.passed = false;
      c.detail = "too few argmax-stable segments: " + std::to_string(usable);
    } else {
      c.detail = std::to_string(usable) + " stable segments checked";
    }
  }
  return c;
}

CheckResult check_z_from_allocation(const Sizes& sz, Rng rng) {
  CheckResult c{"z_allocation_determined", true, ""};
  for (int t = 0; t < sz.structural / 4 && c.passed; ++t) {
    Rng trial = rng.split(t);
    const AuctionSize size{1 + static_cast<int>(trial.next_u64() % 3),
                           1 + static_cast<int>(trial.next_u64() % 3)};
    const ValuationProfile profile = sample_profile(setting_of(t), size, trial);
    const VvcaParams params = random_params(size, trial);
    const mechanism::AuctionOutcome out = mechanism::run_auction(profile, params);
    double z = 0.0;
    for (int i = 0; i < size.n_bidders; ++i) {
      z += profile.value(i, out.allocation.bundles[i]);
    }
    if (!rel_close(z, out.welfare_z, 1e-12)) {
      c.passed = false;
      c.detail = "Z is not recomputable from the allocation";
    }
  }
  return c;
}

}  // namespace

VerifyReport verify_suite(VerifyScale scale, const VerifyHooks& hooks) {
  const Sizes sz = sizes_for(scale);
  const WinnerFn winner_fn =
      hooks.winner_fn ? hooks.winner_fn
                      : [](const ValuationProfile& p, const VvcaParams& params) {
                          return winner::solve_winner(p, params);
                        };
  const OutcomeFn transform =
      hooks.outcome_transform ? hooks.outcome_transform : [](mechanism::AuctionOutcome&) {};

  const Rng root(0x5EEDAB1EULL);
  VerifyReport report;
  report.checks.push_back(check_kernel_equivalence(root.split(1)));
  report.checks.push_back(check_oracle_equivalence(sz, root.split(2), winner_fn));
  report.checks.push_back(check_batch_vs_sequential(root.split(3)));
  report.checks.push_back(check_structural_identities(sz, root.split(4), transform));
  report.checks.push_back(check_ir_and_payment_sign(sz, root.split(5), transform));
  report.checks.push_back(check_dsic_sampling(sz, root.split(6)));
  report.checks.push_back(check_vcg_reduction(sz, root.split(7)));
  report.checks.push_back(check_op_count(sz, root.split(8)));
  report.checks.push_back(check_sweep_accounting(root.split(9)));
  report.checks.push_back(check_reproducibility(root.split(10)));
  report.checks.push_back(check_myerson(sz, root.split(11)));
  report.checks.push_back(check_f_continuity(sz, root.split(12)));
  report.checks.push_back(check_z_from_allocation(sz, root.split(13)));
  return report;
}

}  // namespace vvca::harness
