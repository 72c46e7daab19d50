#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "vvca/baselines.hpp"
#include "vvca/domain.hpp"
#include "vvca/mechanism.hpp"
#include "vvca/odvvca.hpp"

namespace vvca::harness {

enum class Method { kOdVvca, kFoVvca, kBbbVvca, kVcg, kItemMyerson };

Method parse_method(std::string_view s);
std::string to_string(Method m);

struct ExperimentConfig {
  SettingId setting = SettingId::A;
  AuctionSize size;
  Method method = Method::kOdVvca;
  odvvca::TrainConfig train;
  int runs = 5;
  std::filesystem::path output_dir;
  std::string name;  // defaults to "<method>_<n>x<m>_<setting>"

  std::string effective_name() const;
  void validate() const;
};

struct RunResult {
  int run = 0;
  std::uint64_t seed = 0;
  double revenue = 0.0;
  odvvca::TrainReport report;  // empty curve for non-training methods
};

struct ExperimentReport {
  std::vector<RunResult> runs;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
};

/// `runs` independently seeded runs; each trains when the method calls
/// for it and is scored on a fresh held-out sample of train.eval_size.
/// When output_dir is non-empty, writes per-run params.json / curve.csv
/// / report.csv plus an aggregate report.csv.
ExperimentReport run_experiment(const ExperimentConfig& config);

struct GridRow {
  double x = 0.0, y = 0.0;
  double r = 0.0, f = 0.0, z = 0.0;
};

/// The symmetric two-parameter slice of a 2x2 auction: singleton boosts
/// x, grand-bundle boosts y, weights fixed at 1. One row per grid point
/// on the given evaluation batch.
std::vector<GridRow> case_study_grid(std::pair<double, double> x_range,
                                     std::pair<double, double> y_range, int grid_n,
                                     const ValuationBatch& batch);
void write_grid_csv(const std::vector<GridRow>& rows, std::ostream& out);

struct SweepRow {
  double lambda_value = 0.0;
  double z = 0.0;
  std::vector<double> z_smooth;  // one per sigma
  double grad_estimate = 0.0;    // smoothed-gradient sample at the first sigma
};

struct LambdaCoordinate {
  int bidder = 0;
  BundleMask bundle = 0;
};

/// One-dimensional welfare slice: vary a single boost entry, report the
/// exact welfare mean, its Monte-Carlo Gaussian smoothing per sigma
/// (common directions across sigmas and sweep points), and the smoothed
/// gradient estimate for the swept coordinate.
std::vector<SweepRow> smoothing_sweep(LambdaCoordinate coordinate,
                                      std::pair<double, double> value_range, int points,
                                      const std::vector<double>& sigmas,
                                      const ValuationBatch& batch, int directions,
                                      std::uint64_t seed,
                                      const VvcaParams* base_params = nullptr);
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::vector<double>& sigmas,
                     std::ostream& out);

enum class VerifyScale { kQuick, kFull };

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

/// Fault-injection points for the verification suite's own tests:
/// swap in an alternative winner or post-process outcomes.
struct VerifyHooks {
  std::function<winner::WinnerResult(const ValuationProfile&, const VvcaParams&)> winner_fn;
  std::function<void(mechanism::AuctionOutcome&)> outcome_transform;
};

/// Cross-module property suite (oracle equivalence, kernel equivalence,
/// structural identities, incentive sampling, operation counts,
/// reproducibility, Myerson checks). Quick runs in well under a minute;
/// full uses the acceptance-scale sample counts.
VerifyReport verify_suite(VerifyScale scale, const VerifyHooks& hooks = {});
void print_verify_report(const VerifyReport& report, std::ostream& out);

}  // namespace vvca::harness
