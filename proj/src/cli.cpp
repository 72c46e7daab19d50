#include "vvca/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vvca/harness.hpp"
#include "vvca/sampling.hpp"

namespace vvca::cli {

namespace {

// The flat config keys shared by the work subcommands. A config file
// (--config, `key = value` lines) populates them; command-line flags
// override. Unknown keys are errors.
struct Options {
  std::string setting = "A";
  int n = 2;
  int m = 2;
  std::string method = "od_vvca";
  double lr = -1.0;      // <0: use the per-setting default
  int iterations = -1;
  int batch_size = -1;
  int n_r = -1;
  double sigma = -1.0;
  int runs = 5;
  std::uint64_t seed = 0;
  int eval_size = 1 << 16;
  std::string output_dir;
};

// Registered once on the root app; subcommand arguments fall through,
// so both `--config file` and flag overrides work uniformly.
void add_common_options(CLI::App& app, Options& opt) {
  app.fallthrough(true);
  app.set_config("--config", "", "flat key=value configuration file");
  app.allow_config_extras(false);
  app.add_option("--setting", opt.setting, "valuation setting: A, B, C or D");
  app.add_option("--n", opt.n, "number of bidders");
  app.add_option("--m", opt.m, "number of items");
  app.add_option("--method", opt.method, "od_vvca, fo_vvca, bbbvvca, vcg or item_myerson");
  app.add_option("--lr", opt.lr, "learning rate");
  app.add_option("--iterations", opt.iterations, "training iterations");
  app.add_option("--batch_size", opt.batch_size, "training batch size");
  app.add_option("--n_r", opt.n_r, "random directions for the smoothed gradient");
  app.add_option("--sigma", opt.sigma, "Gaussian smoothing scale");
  app.add_option("--runs", opt.runs, "independent runs");
  app.add_option("--seed", opt.seed, "base seed");
  app.add_option("--eval_size", opt.eval_size, "held-out evaluation profiles");
  app.add_option("--output_dir", opt.output_dir, "where reports and params go");
}

odvvca::TrainConfig train_config_from(const Options& opt) {
  const auto defaults =
      odvvca::default_train_config(parse_setting(opt.setting), {opt.n, opt.m});
  odvvca::TrainConfig tc = defaults.config;
  if (opt.lr >= 0.0) tc.learning_rate = opt.lr;
  if (opt.iterations >= 0) tc.iterations = opt.iterations;
  if (opt.batch_size > 0) tc.batch_size = opt.batch_size;
  if (opt.n_r > 0) tc.smoothing.n_r = opt.n_r;
  if (opt.sigma > 0.0) tc.smoothing.sigma = opt.sigma;
  tc.eval_size = opt.eval_size;
  tc.seed = opt.seed;
  tc.smoothing.seed = opt.seed + 1;
  return tc;
}

int cmd_sample(const Options& opt, int count, const std::string& out_path) {
  const ValuationBatch batch =
      sample_batch(parse_setting(opt.setting), {opt.n, opt.m}, count, opt.seed);
  write_batch(batch, out_path);
  std::cout << "wrote " << count << " profiles to " << out_path << "\n";
  return 0;
}

int cmd_train(const Options& opt) {
  harness::ExperimentConfig config;
  config.setting = parse_setting(opt.setting);
  config.size = {opt.n, opt.m};
  config.method = harness::parse_method(opt.method);
  config.train = train_config_from(opt);
  if (config.method == harness::Method::kBbbVvca && opt.iterations < 0) {
    config.train.iterations = baselines::kBbbDefaultIterations;
  }
  config.runs = opt.runs;
  config.output_dir = opt.output_dir.empty() ? "out" : opt.output_dir;
  const harness::ExperimentReport report = harness::run_experiment(config);
  std::printf("%s: mean revenue %.6f, std %.6f over %d runs\n",
              config.effective_name().c_str(), report.mean, report.stddev,
              static_cast<int>(report.runs.size()));
  for (const harness::RunResult& run : report.runs) {
    std::printf("  run %d (seed %llu): %.6f\n", run.run,
                static_cast<unsigned long long>(run.seed), run.revenue);
  }
  return 0;
}

int cmd_evaluate(const Options& opt, const std::string& params_path) {
  const SettingId setting = parse_setting(opt.setting);
  const AuctionSize size{opt.n, opt.m};
  const harness::Method method = harness::parse_method(opt.method);
  if (method == harness::Method::kItemMyerson) {
    const double rev =
        baselines::item_myerson_revenue_sampled(setting, size, opt.eval_size, opt.seed);
    std::printf("item_myerson mean revenue: %.6f (%d profiles)\n", rev, opt.eval_size);
    return 0;
  }
  VvcaParams params = VvcaParams::zeros(size);
  if (!params_path.empty()) {
    params = mechanism::load_params(params_path);
    if (!(params.size == size)) {
      throw CLI::ValidationError("--params", "parameter file size differs from --n/--m");
    }
  } else if (method != harness::Method::kVcg) {
    throw CLI::ValidationError("--method", "trained methods need --params FILE");
  }
  const odvvca::EvalSummary s =
      odvvca::evaluate_sampled(params, setting, size, opt.eval_size, opt.seed);
  std::printf("mean revenue %.6f  (Z %.6f, F %.6f) over %d profiles\n", s.breakdown.r_mean,
              s.breakdown.z_mean, s.breakdown.f_mean, opt.eval_size);
  for (std::size_t i = 0; i < s.payment_means.size(); ++i) {
    std::printf("  bidder %zu mean payment %.6f\n", i, s.payment_means[i]);
  }
  return 0;
}

int cmd_grid(const Options& opt, double x0, double x1, double y0, double y1, int grid_n,
             int batch_count, const std::string& out_path) {
  const ValuationBatch batch =
      sample_batch(parse_setting(opt.setting), {opt.n, opt.m}, batch_count, opt.seed);
  const auto rows = harness::case_study_grid({x0, x1}, {y0, y1}, grid_n, batch);
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open " + out_path);
  harness::write_grid_csv(rows, out);
  std::cout << "wrote " << rows.size() << " grid rows to " << out_path << "\n";
  return 0;
}

int cmd_sweep(const Options& opt, int bidder, std::uint32_t bundle, double from, double to,
              int points, std::vector<double> sigmas, int directions, int batch_count,
              const std::string& out_path) {
  const ValuationBatch batch =
      sample_batch(parse_setting(opt.setting), {opt.n, opt.m}, batch_count, opt.seed);
  if (sigmas.empty()) sigmas = {0.001, 0.003, 0.01};
  const auto rows = harness::smoothing_sweep({bidder, bundle}, {from, to}, points, sigmas,
                                             batch, directions, opt.seed + 17);
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open " + out_path);
  harness::write_sweep_csv(rows, sigmas, out);
  std::cout << "wrote " << rows.size() << " sweep rows to " << out_path << "\n";
  return 0;
}

int cmd_verify(const std::string& scale) {
  harness::VerifyScale s;
  if (scale == "quick") {
    s = harness::VerifyScale::kQuick;
  } else if (scale == "full") {
    s = harness::VerifyScale::kFull;
  } else {
    throw CLI::ValidationError("--scale", "must be quick or full");
  }
  const harness::VerifyReport report = harness::verify_suite(s);
  harness::print_verify_report(report, std::cout);
  return report.all_passed() ? 0 : 1;
}

int cmd_defaults(const Options& opt) {
  std::cout << render_config_defaults(parse_setting(opt.setting), {opt.n, opt.m});
  return 0;
}

}  // namespace

std::string render_config_defaults(SettingId setting, AuctionSize size) {
  const odvvca::DefaultConfig d = odvvca::default_train_config(setting, size);
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "# defaults for %dx%d setting %s%s\n"
                "setting = %s\n"
                "n = %d\n"
                "m = %d\n"
                "lr = %g\n"
                "iterations = %d\n"
                "batch_size = %d\n"
                "n_r = %d\n"
                "sigma = %g\n",
                size.n_bidders, size.n_items, to_string(setting).c_str(),
                d.fallback ? " (global fallback)" : "", to_string(setting).c_str(),
                size.n_bidders, size.n_items, d.config.learning_rate, d.config.iterations,
                d.config.batch_size, d.config.smoothing.n_r, d.config.smoothing.sigma);
  return buf;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"deterministic VVCA design: winner determination, revenue "
               "optimization, baselines and verification"};
  app.require_subcommand(1);

  Options opt;
  add_common_options(app, opt);

  auto* sample = app.add_subcommand("sample", "sample a valuation batch to a file");
  int sample_count = 1024;
  std::string sample_out = "batch.bin";
  sample->add_option("--count", sample_count, "profiles to sample");
  sample->add_option("--out", sample_out, "output file");

  auto* train = app.add_subcommand("train", "train a mechanism and report revenue");

  auto* evaluate = app.add_subcommand("evaluate", "evaluate a mechanism on fresh samples");
  std::string eval_params;
  evaluate->add_option("--params", eval_params, "parameter JSON file");

  auto* grid = app.add_subcommand("grid", "two-boost revenue surface of a 2x2 auction");
  double x0 = -1.0, x1 = 1.0, y0 = -1.0, y1 = 1.0;
  int grid_n = 81, grid_batch = 256;
  std::string grid_out = "grid.csv";
  grid->add_option("--x_min", x0);
  grid->add_option("--x_max", x1);
  grid->add_option("--y_min", y0);
  grid->add_option("--y_max", y1);
  grid->add_option("--grid_n", grid_n);
  grid->add_option("--batch_count", grid_batch, "evaluation batch size");
  grid->add_option("--out", grid_out);

  auto* sweep = app.add_subcommand("sweep", "one-boost welfare slice with smoothing");
  int sweep_bidder = 0;
  std::uint32_t sweep_bundle = 1;
  double sweep_from = -1.0, sweep_to = 1.0;
  int sweep_points = 41, sweep_dirs = 512, sweep_batch = 256;
  std::vector<double> sweep_sigmas;
  std::string sweep_out = "sweep.csv";
  sweep->add_option("--bidder", sweep_bidder, "bidder of the swept boost");
  sweep->add_option("--bundle", sweep_bundle, "bundle mask of the swept boost");
  sweep->add_option("--from", sweep_from);
  sweep->add_option("--to", sweep_to);
  sweep->add_option("--points", sweep_points);
  sweep->add_option("--sigmas", sweep_sigmas, "smoothing scales");
  sweep->add_option("--directions", sweep_dirs, "Monte-Carlo directions");
  sweep->add_option("--batch_count", sweep_batch, "evaluation batch size");
  sweep->add_option("--out", sweep_out);

  auto* verify = app.add_subcommand("verify", "run the cross-module property suite");
  std::string verify_scale = "quick";
  verify->add_option("--scale", verify_scale, "quick or full");

  auto* defaults = app.add_subcommand("defaults", "print per-setting hyperparameters");
  (void)defaults;

  try {
    app.parse(argc, argv);
    if (sample->parsed()) return cmd_sample(opt, sample_count, sample_out);
    if (train->parsed()) return cmd_train(opt);
    if (evaluate->parsed()) return cmd_evaluate(opt, eval_params);
    if (grid->parsed()) {
      return cmd_grid(opt, x0, x1, y0, y1, grid_n, grid_batch, grid_out);
    }
    if (sweep->parsed()) {
      return cmd_sweep(opt, sweep_bidder, sweep_bundle, sweep_from, sweep_to, sweep_points,
                       sweep_sigmas, sweep_dirs, sweep_batch, sweep_out);
    }
    if (verify->parsed()) return cmd_verify(verify_scale);
    if (defaults->parsed()) return cmd_defaults(opt);
    return 2;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace vvca::cli
