// Acceptance suite: one pass/fail line per criterion, nonzero exit on
// any failure. `--only K` runs a single criterion, `--list` names them.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "vvca/baselines.hpp"
#include "vvca/harness.hpp"
#include "vvca/mechanism.hpp"
#include "vvca/odvvca.hpp"
#include "vvca/rng.hpp"
#include "vvca/sampling.hpp"
#include "vvca/winner.hpp"

#include "test_support.hpp"

using namespace vvca;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

VvcaParams random_params(AuctionSize size, Rng& rng) {
  VvcaParams p = VvcaParams::zeros(size);
  for (double& a : p.alpha) a = rng.uniform(-1.0, 1.0);
  for (double& l : p.lambda) l = rng.uniform(-1.0, 1.0);
  return p;
}

// --- 1: DP vs exhaustive oracle --------------------------------------------

Outcome criterion_oracle() {
  Rng rng(0xACC1);
  double max_rel = 0.0;
  for (int s = 0; s < 4; ++s) {
    const SettingId setting = static_cast<SettingId>(s);
    for (int t = 0; t < 1000; ++t) {
      Rng trial = rng.split(s * 1000000 + t);
      const AuctionSize size{1 + static_cast<int>(trial.next_u64() % 4),
                             1 + static_cast<int>(trial.next_u64() % 4)};
      const ValuationProfile profile = sample_profile(setting, size, trial);
      const VvcaParams params = random_params(size, trial);
      const auto dp = winner::solve_winner(profile, params);
      const auto bf = winner::brute_force_winner(profile, params);
      const double rel = std::abs(dp.max_affine_welfare - bf.max_affine_welfare) /
                         std::max(1.0, std::abs(bf.max_affine_welfare));
      max_rel = std::max(max_rel, rel);
      if (rel > 1e-12) {
        return {false, "welfare mismatch, rel " + std::to_string(rel)};
      }
      if (dp.allocation != bf.allocation) {
        return {false, "allocation mismatch under the shared tie-break"};
      }
    }
  }
  std::ostringstream os;
  os << "4000 instances, max rel err " << max_rel;
  return {true, os.str()};
}

// --- 2: VCG closed-form revenues --------------------------------------------

Outcome criterion_vcg_revenue() {
  struct Case {
    AuctionSize size;
    double expect, tol;
  };
  const Case cases[] = {
      {{2, 2}, 2.0 / 3.0, 0.01},
      {{3, 10}, 5.0, 0.02},
      {{10, 5}, 45.0 / 11.0, 0.02},
  };
  std::ostringstream os;
  for (const Case& c : cases) {
    const auto s = odvvca::evaluate_sampled(VvcaParams::zeros(c.size), SettingId::A, c.size,
                                            1000000, 0xACC2 + c.size.n_bidders);
    os << c.size.n_bidders << "x" << c.size.n_items << "=" << s.breakdown.r_mean << " ";
    if (std::abs(s.breakdown.r_mean - c.expect) > c.tol) {
      return {false, os.str() + "(expected " + std::to_string(c.expect) + ")"};
    }
  }
  return {true, os.str()};
}

// --- 3: Item-Myerson revenues ------------------------------------------------

Outcome criterion_myerson_revenue() {
  struct Case {
    AuctionSize size;
    double expect, tol;
  };
  const Case cases[] = {
      {{2, 2}, 5.0 / 6.0, 0.01},
      {{2, 5}, 25.0 / 12.0, 0.02},
  };
  std::ostringstream os;
  for (const Case& c : cases) {
    const double rev = baselines::item_myerson_revenue_sampled(SettingId::A, c.size, 1000000,
                                                               0xACC3 + c.size.n_items);
    os << c.size.n_bidders << "x" << c.size.n_items << "=" << rev << " ";
    if (std::abs(rev - c.expect) > c.tol) {
      return {false, os.str() + "(expected " + std::to_string(c.expect) + ")"};
    }
  }
  return {true, os.str()};
}

// --- 4: structural identities -----------------------------------------------

Outcome criterion_identities() {
  Rng rng(0xACC4);
  for (int t = 0; t < 2000; ++t) {
    Rng trial = rng.split(t);
    const SettingId setting = static_cast<SettingId>(t % 4);
    const AuctionSize size{1 + static_cast<int>(trial.next_u64() % 4),
                           1 + static_cast<int>(trial.next_u64() % 3)};
    const ValuationProfile profile = sample_profile(setting, size, trial);
    const VvcaParams params = random_params(size, trial);
    const auto out = mechanism::run_auction(profile, params);

    double pay_sum = 0.0;
    for (double p : out.payments) {
      if (p < -1e-12) return {false, "negative payment " + std::to_string(p)};
      pay_sum += p;
    }
    const double scale_ref = std::max(1.0, std::abs(out.revenue));
    if (std::abs(out.revenue - pay_sum) > 1e-9 * scale_ref) {
      return {false, "revenue != sum of payments"};
    }
    if (std::abs(out.revenue - (out.welfare_z + out.continuous_f)) > 1e-9 * scale_ref) {
      return {false, "revenue != Z + F"};
    }
    for (double c : {0.5, 2.0, 10.0}) {
      VvcaParams scaled = params;
      for (double& a : scaled.alpha) a += std::log(c);
      for (double& l : scaled.lambda) l *= c;
      const auto out2 = mechanism::run_auction(profile, scaled);
      if (std::abs(out2.revenue - out.revenue) > 1e-9 * scale_ref) {
        return {false, "revenue changed under joint scaling"};
      }
    }
  }
  return {true, "2000 instances, identities and scale invariance hold"};
}

// --- 5: incentive properties --------------------------------------------------

Outcome criterion_incentives() {
  Rng rng(0xACC5);
  double worst_gain = -1.0;
  for (int t = 0; t < 10000; ++t) {
    Rng trial = rng.split(t);
    const AuctionSize size = t % 2 == 0 ? AuctionSize{2, 3} : AuctionSize{3, 3};
    const ValuationProfile truth = sample_profile(SettingId::A, size, trial);
    const VvcaParams params = random_params(size, trial);
    const int bidder = static_cast<int>(trial.next_u64() % size.n_bidders);

    const double truthful = mechanism::utility(truth, truth, params, bidder);
    if (truthful < -1e-9) return {false, "IR violated: " + std::to_string(truthful)};

    ValuationProfile mis = truth;
    if (t % 2 == 0) {
      Rng redraw = trial.split(1);
      const ValuationProfile other = sample_profile(SettingId::A, size, redraw);
      const std::uint32_t full = size.bundle_count();
      std::copy_n(other.values.begin() + static_cast<std::size_t>(bidder) * full, full,
                  mis.values.begin() + static_cast<std::size_t>(bidder) * full);
    } else {
      const std::uint32_t bundle =
          1 + static_cast<std::uint32_t>(trial.next_u64() % (size.bundle_count() - 1));
      mis.value(bidder, bundle) = trial.uniform(0.0, 3.0);
      mis.additive = false;
    }
    const double gain = mechanism::utility(truth, mis, params, bidder) - truthful;
    worst_gain = std::max(worst_gain, gain);
    if (gain > 1e-9) return {false, "DSIC violated, gain " + std::to_string(gain)};
  }
  std::ostringstream os;
  os << "10000 pairs, worst misreport gain " << worst_gain;
  return {true, os.str()};
}

// --- 6: gradient correctness ---------------------------------------------------

Outcome criterion_gradients() {
  // 6a: analytic gradient of F vs central finite differences.
  Rng rng(0xACC6);
  constexpr double kH = 1e-5;
  int instances = 0;
  double max_rel = 0.0;
  for (int trial = 0; instances < 100 && trial < 2000; ++trial) {
    Rng t = rng.split(trial);
    const AuctionSize size = trial % 2 == 0 ? AuctionSize{2, 3} : AuctionSize{3, 3};
    ValuationBatch batch;
    batch.size = size;
    batch.setting = SettingId::A;
    batch.profiles.push_back(sample_profile(SettingId::A, size, t));
    const VvcaParams params = random_params(size, t);
    const auto g = odvvca::grad_F(batch, params);

    auto argmaxes = [&](const VvcaParams& p) {
      std::vector<winner::Allocation> a;
      a.push_back(winner::solve_winner(batch.profiles[0], p).allocation);
      for (int i = 0; i < size.n_bidders; ++i) {
        a.push_back(winner::solve_winner(batch.profiles[0], p, i).allocation);
      }
      return a;
    };
    const auto base_argmax = argmaxes(params);

    bool used = false;
    const std::size_t dim_a = params.alpha.size();
    const std::size_t dim_l = params.lambda.size();
    for (int probe = 0; probe < 3; ++probe) {
      const std::size_t c = t.next_u64() % (dim_a + dim_l);
      VvcaParams lo = params, hi = params;
      double analytic;
      if (c < dim_a) {
        lo.alpha[c] -= kH;
        hi.alpha[c] += kH;
        analytic = g.d_alpha[c];
      } else {
        lo.lambda[c - dim_a] -= kH;
        hi.lambda[c - dim_a] += kH;
        analytic = g.d_lambda[c - dim_a];
      }
      if (argmaxes(lo) != base_argmax || argmaxes(hi) != base_argmax) continue;
      const double f_hi = mechanism::run_auction(batch.profiles[0], hi).continuous_f;
      const double f_lo = mechanism::run_auction(batch.profiles[0], lo).continuous_f;
      const double fd = (f_hi - f_lo) / (2.0 * kH);
      if (std::abs(fd) < 1e-10 && std::abs(analytic) < 1e-10) {
        used = true;
        continue;
      }
      const double rel = std::abs(analytic - fd) / std::max(1e-6, std::abs(fd));
      max_rel = std::max(max_rel, rel);
      if (rel > 1e-4) {
        return {false, "grad_F vs finite differences, rel err " + std::to_string(rel)};
      }
      used = true;
    }
    if (used) ++instances;
  }
  if (instances < 100) return {false, "too few argmax-stable instances"};

  // 6b: Proposition-1 estimator mean (10^4 direction rounds through the
  // production estimator) vs a central finite difference of the
  // Monte-Carlo smoothed welfare on the 2x2 uniform fixture.
  const AuctionSize size{2, 2};
  const ValuationBatch batch = sample_batch(SettingId::A, size, 256, 0xF1C);
  const VvcaParams params = VvcaParams::zeros(size);
  const double sigma = 0.01;
  const std::size_t coord = 3;  // bidder 0, grand bundle
  const std::size_t count = batch.profiles.size();

  const auto outcomes = mechanism::run_auction_batch(batch, params);
  std::vector<double> baseline(count);
  for (std::size_t p = 0; p < count; ++p) baseline[p] = outcomes[p].welfare_z;

  const Rng eroot(0xACC7);
  std::vector<double> est_samples;
  for (int call = 0; call < 1250; ++call) {  // 1250 x n_r=8 directions
    Rng r = eroot.split(call);
    const auto g = odvvca::estimate_grad_Z(batch, params, {sigma, 8, 0}, r, baseline);
    est_samples.push_back(g.d_lambda[coord]);
  }
  const auto est = vvca::testing::summarize(est_samples);

  const double h = sigma / 2.0;
  winner::BatchWinnerEngine engine(batch);
  VvcaParams lo = params, hi = params;
  lo.lambda[coord] -= h;
  hi.lambda[coord] += h;
  Rng srng(0xACC8);
  std::vector<double> fd_samples;
  for (int r = 0; r < 20000; ++r) {  // common random numbers across the two points
    const auto dirs = vvca::testing::draw_directions(srng, batch);
    const double z_hi = vvca::testing::perturbed_mean_welfare(engine, batch, hi, sigma, dirs);
    const double z_lo = vvca::testing::perturbed_mean_welfare(engine, batch, lo, sigma, dirs);
    fd_samples.push_back((z_hi - z_lo) / (2.0 * h));
  }
  const auto fd = vvca::testing::summarize(fd_samples);

  const double gap = std::abs(est.mean - fd.mean);
  const double tol = 3.0 * std::sqrt(est.se * est.se + fd.se * fd.se);
  std::ostringstream os;
  os << "grad_F max rel " << max_rel << "; estimator mean " << est.mean << " vs smoothed FD "
     << fd.mean << " (3se " << tol << ")";
  if (gap > tol) return {false, os.str()};
  return {true, os.str()};
}

// --- 7: complexity accounting ---------------------------------------------------

Outcome criterion_op_counts() {
  Rng rng(0xACC9);
  for (int n = 1; n <= 6; ++n) {
    for (int m = 1; m <= 10; ++m) {
      Rng t = rng.split(n * 100 + m);
      const ValuationProfile profile = sample_profile(SettingId::A, {n, m}, t);
      const VvcaParams params = random_params({n, m}, t);
      const auto r = winner::solve_winner(profile, params);
      if (r.op_count != winner::dp_operation_count({n, m})) {
        return {false, "op count mismatch at n=" + std::to_string(n) +
                           " m=" + std::to_string(m)};
      }
    }
  }

  odvvca::TrainConfig cfg;
  cfg.iterations = 2;
  cfg.batch_size = 64;
  cfg.eval_size = 64;
  cfg.curve_every = 10000;
  cfg.seed = 5;
  cfg.smoothing.n_r = 8;
  const AuctionSize size{3, 3};
  const auto r = odvvca::train(SettingId::A, size, cfg);
  const std::uint64_t expected = size.n_bidders + 1 + cfg.smoothing.n_r;
  if (r.report.sweeps_per_iteration != expected) {
    return {false, "OD-VVCA iteration used " + std::to_string(r.report.sweeps_per_iteration) +
                       " sweeps, expected " + std::to_string(expected)};
  }
  return {true, "2^m + (n-1)3^m exact for n<=6, m<=10; iteration = (n+1)+n_r sweeps"};
}

// --- 8: end-to-end training at desk scale ---------------------------------------

Outcome criterion_training() {
  struct Row {
    SettingId setting;
    AuctionSize size;
    double floor;       // required mean held-out revenue
    double also_above;  // additional strict lower bound (VCG value), or 0
  };
  const Row rows[] = {
      {SettingId::A, {2, 2}, 0.80, 2.0 / 3.0},
      {SettingId::A, {2, 5}, 2.20, 0.0},
      {SettingId::B, {5, 3}, 6.70, 0.0},
  };
  std::ostringstream os;
  for (const Row& row : rows) {
    odvvca::TrainConfig cfg = odvvca::default_train_config(row.setting, row.size).config;
    cfg.method = odvvca::TrainMethod::kOdVvca;
    cfg.curve_every = 100;
    cfg.eval_size = 1 << 16;

    std::vector<double> finals;
    const Rng base(0xACCA + row.size.n_bidders * 10 + row.size.n_items);
    for (int run = 0; run < 5; ++run) {
      cfg.seed = base.split(100 + run).root_seed();
      cfg.smoothing.seed = base.split(200 + run).root_seed();
      const auto result = odvvca::train(row.setting, row.size, cfg);
      const double held_out =
          odvvca::evaluate_sampled(result.params, row.setting, row.size, cfg.eval_size,
                                   base.split(300 + run).root_seed())
              .breakdown.r_mean;
      finals.push_back(held_out);
    }
    double mean = 0.0;
    for (double f : finals) mean += f;
    mean /= finals.size();
    double ss = 0.0;
    for (double f : finals) ss += (f - mean) * (f - mean);
    const double stddev = std::sqrt(ss / (finals.size() - 1));

    os << row.size.n_bidders << "x" << row.size.n_items << to_string(row.setting) << " mean "
       << mean << " std/mean " << stddev / mean << "; ";
    if (mean < row.floor) {
      return {false, os.str() + "below floor " + std::to_string(row.floor)};
    }
    if (row.also_above > 0.0 && mean <= row.also_above) {
      return {false, os.str() + "not above VCG " + std::to_string(row.also_above)};
    }
    if (stddev / mean > 0.02) {
      return {false, os.str() + "run-to-run std/mean above 2%"};
    }
  }
  return {true, os.str()};
}

// --- 9: baseline ordering on 5x10 B at reduced budget ----------------------------

Outcome criterion_ordering() {
  const SettingId setting = SettingId::B;
  const AuctionSize size{5, 10};
  odvvca::TrainConfig cfg = odvvca::default_train_config(setting, size).config;
  cfg.iterations = 500;
  cfg.batch_size = 256;
  cfg.eval_size = 4096;
  cfg.curve_every = 1000;

  std::ostringstream os;
  const Rng base(0xACCB);
  for (int run = 0; run < 3; ++run) {
    cfg.seed = base.split(10 + run).root_seed();
    cfg.smoothing.seed = base.split(20 + run).root_seed();

    odvvca::TrainConfig od = cfg;
    od.method = odvvca::TrainMethod::kOdVvca;
    const double r_od = odvvca::train(setting, size, od).report.final_revenue;

    odvvca::TrainConfig fo = cfg;
    fo.method = odvvca::TrainMethod::kFoVvca;
    const double r_fo = odvvca::train(setting, size, fo).report.final_revenue;

    const double r_bbb = baselines::bbbvvca_train(setting, size, cfg).report.final_revenue;

    os << "seed" << run << ": od " << r_od << " fo " << r_fo << " bbb " << r_bbb << "; ";
    if (r_od < r_fo || r_od < r_bbb) {
      return {false, os.str() + "ordering violated"};
    }
  }
  return {true, os.str()};
}

// --- 10: smoothing sweep properties -----------------------------------------------

Outcome criterion_sweep() {
  const ValuationBatch batch = sample_batch(SettingId::A, {2, 2}, 256, 0xF1C);
  const std::vector<double> sigmas{0.001, 0.003, 0.01};
  // The batch-mean welfare steps roughly every 0.005 in this boost, so
  // the repetition probe samples at 0.0004 per step (within the
  // "step <= 0.01" bound) to resolve the pieces.
  const auto rows =
      harness::smoothing_sweep({0, 0b01}, {-0.016, 0.016}, 81, sigmas, batch, 1024, 0xACCC);

  int equal_pairs = 0;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (rows[k].z == rows[k - 1].z) ++equal_pairs;
  }
  const double frac = static_cast<double>(equal_pairs) / (rows.size() - 1);

  std::vector<double> max_dev(sigmas.size(), 0.0);
  for (const auto& row : rows) {
    for (std::size_t si = 0; si < sigmas.size(); ++si) {
      max_dev[si] = std::max(max_dev[si], std::abs(row.z_smooth[si] - row.z));
    }
  }
  std::ostringstream os;
  os << "piecewise-constant fraction " << frac << ", max|Zs-Z| = {" << max_dev[0] << ", "
     << max_dev[1] << ", " << max_dev[2] << "}";
  if (frac < 0.9) return {false, os.str() + ": fraction below 0.9"};
  if (!(max_dev[0] <= max_dev[1] && max_dev[1] <= max_dev[2])) {
    return {false, os.str() + ": deviation not monotone in sigma"};
  }
  return {true, os.str()};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> fn;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {"oracle equivalence (DP vs brute force)", criterion_oracle},
      {"VCG closed-form revenues", criterion_vcg_revenue},
      {"Item-Myerson revenues", criterion_myerson_revenue},
      {"structural identities", criterion_identities},
      {"incentive properties (IR, DSIC)", criterion_incentives},
      {"gradient correctness", criterion_gradients},
      {"complexity accounting", criterion_op_counts},
      {"end-to-end training", criterion_training},
      {"baseline ordering on 5x10 B", criterion_ordering},
      {"smoothing sweep properties", criterion_sweep},
  };

  int only = 0;
  for (int a = 1; a < argc; ++a) {
    if (std::strcmp(argv[a], "--list") == 0) {
      for (std::size_t k = 0; k < criteria.size(); ++k) {
        std::printf("%zu: %s\n", k + 1, criteria[k].name);
      }
      return 0;
    }
    if (std::strcmp(argv[a], "--only") == 0 && a + 1 < argc) only = std::atoi(argv[++a]);
  }

  bool all_passed = true;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (only != 0 && static_cast<int>(k + 1) != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[k].fn();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %zu: %s [%.1fs] %s\n", outcome.passed ? "PASS" : "FAIL", k + 1,
                criteria[k].name, secs, outcome.detail.c_str());
    std::fflush(stdout);
    all_passed = all_passed && outcome.passed;
  }
  return all_passed ? 0 : 1;
}
