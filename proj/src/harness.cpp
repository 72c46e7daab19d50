#include "vvca/harness.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "vvca/parallel.hpp"
#include "vvca/sampling.hpp"

namespace vvca::harness {

Method parse_method(std::string_view s) {
  if (s == "od_vvca") return Method::kOdVvca;
  if (s == "fo_vvca") return Method::kFoVvca;
  if (s == "bbbvvca") return Method::kBbbVvca;
  if (s == "vcg") return Method::kVcg;
  if (s == "item_myerson") return Method::kItemMyerson;
  throw std::invalid_argument("unknown method: " + std::string(s));
}

std::string to_string(Method m) {
  switch (m) {
    case Method::kOdVvca: return "od_vvca";
    case Method::kFoVvca: return "fo_vvca";
    case Method::kBbbVvca: return "bbbvvca";
    case Method::kVcg: return "vcg";
    case Method::kItemMyerson: return "item_myerson";
  }
  throw std::logic_error("invalid Method");
}

std::string ExperimentConfig::effective_name() const {
  if (!name.empty()) return name;
  return to_string(method) + "_" + std::to_string(size.n_bidders) + "x" +
         std::to_string(size.n_items) + "_" + vvca::to_string(setting);
}

void ExperimentConfig::validate() const {
  size.validate();
  train.validate();
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
  if (method == Method::kItemMyerson && setting == SettingId::D) {
    throw std::invalid_argument("Item-Myerson is undefined for the combinatorial setting");
  }
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_curve_csv(const std::vector<odvvca::CurveRow>& curve, std::ostream& out) {
  out << "iteration,r_mean,z_mean,f_mean,grad_norm_alpha,grad_norm_lambda,wall_ms\n";
  for (const odvvca::CurveRow& row : curve) {
    out << row.iteration << ',' << fmt_double(row.r_mean) << ',' << fmt_double(row.z_mean)
        << ',' << fmt_double(row.f_mean) << ',' << fmt_double(row.grad_norm_alpha) << ','
        << fmt_double(row.grad_norm_lambda) << ',' << fmt_double(row.wall_ms) << '\n';
  }
}

// Seed streams per run within an experiment.
constexpr std::uint64_t kRunStream = 1000;
constexpr std::uint64_t kSmoothStream = 2000;
constexpr std::uint64_t kHeldOutStream = 3000;

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Rng base(config.train.seed);
  const bool trains = config.method == Method::kOdVvca || config.method == Method::kFoVvca ||
                      config.method == Method::kBbbVvca;

  std::filesystem::path exp_dir;
  if (!config.output_dir.empty()) {
    exp_dir = config.output_dir / config.effective_name();
    std::filesystem::create_directories(exp_dir);
  }

  ExperimentReport report;
  report.runs.reserve(config.runs);
  for (int k = 0; k < config.runs; ++k) {
    RunResult run;
    run.run = k;
    run.seed = base.split(kRunStream + k).root_seed();
    const std::uint64_t held_out_seed = base.split(kHeldOutStream + k).root_seed();

    VvcaParams params = VvcaParams::zeros(config.size);
    switch (config.method) {
      case Method::kOdVvca:
      case Method::kFoVvca: {
        odvvca::TrainConfig tc = config.train;
        tc.method = config.method == Method::kFoVvca ? odvvca::TrainMethod::kFoVvca
                                                     : odvvca::TrainMethod::kOdVvca;
        tc.seed = run.seed;
        tc.smoothing.seed = base.split(kSmoothStream + k).root_seed();
        odvvca::TrainResult r = odvvca::train(config.setting, config.size, tc);
        params = std::move(r.params);
        run.report = std::move(r.report);
        break;
      }
      case Method::kBbbVvca: {
        odvvca::TrainConfig tc = config.train;
        tc.seed = run.seed;
        odvvca::TrainResult r = baselines::bbbvvca_train(config.setting, config.size, tc);
        params = std::move(r.params);
        run.report = std::move(r.report);
        break;
      }
      case Method::kVcg:
        break;
      case Method::kItemMyerson:
        break;
    }

    if (config.method == Method::kItemMyerson) {
      run.revenue = baselines::item_myerson_revenue_sampled(
          config.setting, config.size, config.train.eval_size, held_out_seed);
    } else {
      run.revenue = odvvca::evaluate_sampled(params, config.setting, config.size,
                                             config.train.eval_size, held_out_seed)
                        .breakdown.r_mean;
    }

    if (!exp_dir.empty()) {
      const std::filesystem::path run_dir = exp_dir / ("run_" + std::to_string(k));
      std::filesystem::create_directories(run_dir);
      if (config.method != Method::kItemMyerson) {
        mechanism::save_params(params, run_dir / "params.json", config.setting, run.seed);
      }
      if (trains) {
        std::ofstream curve(run_dir / "curve.csv");
        write_curve_csv(run.report.curve, curve);
      }
      std::ofstream rep(run_dir / "report.csv");
      rep << "run,seed,revenue\n"
          << k << ',' << run.seed << ',' << fmt_double(run.revenue) << '\n';
    }
    report.runs.push_back(std::move(run));
  }

  double mean = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < report.runs.size(); ++k) {
    const double x = report.runs[k].revenue;
    const double d = x - mean;
    mean += d / static_cast<double>(k + 1);
    m2 += d * (x - mean);
  }
  report.mean = mean;
  report.stddev = report.runs.size() > 1
                      ? std::sqrt(m2 / static_cast<double>(report.runs.size() - 1))
                      : 0.0;

  if (!exp_dir.empty()) {
    std::ofstream rep(exp_dir / "report.csv");
    rep << "run,seed,revenue\n";
    for (const RunResult& run : report.runs) {
      rep << run.run << ',' << run.seed << ',' << fmt_double(run.revenue) << '\n';
    }
    rep << "mean,," << fmt_double(report.mean) << '\n';
    rep << "std,," << fmt_double(report.stddev) << '\n';
  }
  return report;
}

std::vector<GridRow> case_study_grid(std::pair<double, double> x_range,
                                     std::pair<double, double> y_range, int grid_n,
                                     const ValuationBatch& batch) {
  if (batch.size.n_bidders != 2 || batch.size.n_items != 2) {
    throw std::invalid_argument("case study grid needs a 2x2 auction");
  }
  if (grid_n < 1) throw std::invalid_argument("grid_n must be >= 1");

  auto coord = [&](std::pair<double, double> range, int idx) {
    if (grid_n == 1) return range.first;
    return range.first + (range.second - range.first) * idx / (grid_n - 1);
  };

  std::vector<GridRow> rows(static_cast<std::size_t>(grid_n) * grid_n);
  for (int yi = 0; yi < grid_n; ++yi) {
    for (int xi = 0; xi < grid_n; ++xi) {
      const double x = coord(x_range, xi);
      const double y = coord(y_range, yi);
      VvcaParams params = VvcaParams::zeros(batch.size);
      for (int i = 0; i < 2; ++i) {
        params.lambda_at(i, 0b01) = x;
        params.lambda_at(i, 0b10) = x;
        params.lambda_at(i, 0b11) = y;
      }
      const mechanism::RevenueBreakdown b = mechanism::revenue_breakdown_batch(batch, params);
      rows[static_cast<std::size_t>(yi) * grid_n + xi] = {x, y, b.r_mean, b.f_mean, b.z_mean};
    }
  }
  return rows;
}

void write_grid_csv(const std::vector<GridRow>& rows, std::ostream& out) {
  out << "x,y,R,F,Z\n";
  for (const GridRow& r : rows) {
    out << fmt_double(r.x) << ',' << fmt_double(r.y) << ',' << fmt_double(r.r) << ','
        << fmt_double(r.f) << ',' << fmt_double(r.z) << '\n';
  }
}

std::vector<SweepRow> smoothing_sweep(LambdaCoordinate coordinate,
                                      std::pair<double, double> value_range, int points,
                                      const std::vector<double>& sigmas,
                                      const ValuationBatch& batch, int directions,
                                      std::uint64_t seed, const VvcaParams* base_params) {
  if (points < 1) throw std::invalid_argument("points must be >= 1");
  if (directions < 1) throw std::invalid_argument("directions must be >= 1");
  if (sigmas.empty()) throw std::invalid_argument("need at least one sigma");
  const int n = batch.size.n_bidders;
  const std::uint32_t full = batch.size.bundle_count();
  if (coordinate.bidder < 0 || coordinate.bidder >= n || coordinate.bundle >= full) {
    throw std::invalid_argument("invalid lambda coordinate");
  }
  for (double s : sigmas) {
    if (s <= 0.0) throw std::invalid_argument("sigma must be > 0");
  }

  VvcaParams base = base_params ? *base_params : VvcaParams::zeros(batch.size);
  if (base.size != batch.size) throw std::invalid_argument("base params size mismatch");
  const std::size_t coord_idx =
      static_cast<std::size_t>(coordinate.bidder) * full + coordinate.bundle;

  // Common base directions, reused (scaled) for every sigma and sweep
  // point; keeps the sigma comparison free of sampling jitter.
  const std::size_t dim_a = base.alpha.size();
  const std::size_t dim_l = base.lambda.size();
  std::vector<double> eps(static_cast<std::size_t>(directions) * dim_a);
  std::vector<double> delta(static_cast<std::size_t>(directions) * dim_l);
  Rng rng(seed);
  for (int d = 0; d < directions; ++d) {
    for (std::size_t i = 0; i < dim_a; ++i) eps[d * dim_a + i] = rng.normal();
    for (std::size_t k = 0; k < dim_l; ++k) delta[d * dim_l + k] = rng.normal();
  }

  std::vector<SweepRow> rows(points);
  VvcaParams probe = base;
  for (int pt = 0; pt < points; ++pt) {
    const double v = points == 1 ? value_range.first
                                 : value_range.first + (value_range.second - value_range.first) *
                                                           pt / (points - 1);
    base.lambda[coord_idx] = v;
    SweepRow& row = rows[pt];
    row.lambda_value = v;
    row.z = mechanism::mean_social_welfare(batch, base);
    row.z_smooth.assign(sigmas.size(), 0.0);
    for (std::size_t si = 0; si < sigmas.size(); ++si) {
      const double sigma = sigmas[si];
      double acc = 0.0;
      double grad_acc = 0.0;
      for (int d = 0; d < directions; ++d) {
        for (std::size_t i = 0; i < dim_a; ++i) {
          probe.alpha[i] = base.alpha[i] + sigma * eps[d * dim_a + i];
        }
        for (std::size_t k = 0; k < dim_l; ++k) {
          probe.lambda[k] = base.lambda[k] + sigma * delta[d * dim_l + k];
        }
        const double z = mechanism::mean_social_welfare(batch, probe);
        acc += z;
        if (si == 0) {
          grad_acc += (z - row.z) / sigma * delta[d * dim_l + coord_idx];
        }
      }
      row.z_smooth[si] = acc / directions;
      if (si == 0) row.grad_estimate = grad_acc / directions;
    }
  }
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::vector<double>& sigmas,
                     std::ostream& out) {
  out << "lambda_value,z";
  for (double s : sigmas) out << ",z_smooth_" << fmt_double(s);
  out << ",grad_estimate\n";
  for (const SweepRow& r : rows) {
    out << fmt_double(r.lambda_value) << ',' << fmt_double(r.z);
    for (double zs : r.z_smooth) out << ',' << fmt_double(zs);
    out << ',' << fmt_double(r.grad_estimate) << '\n';
  }
}

bool VerifyReport::all_passed() const {
  for (const CheckResult& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

void print_verify_report(const VerifyReport& report, std::ostream& out) {
  for (const CheckResult& c : report.checks) {
    out << (c.passed ? "PASS" : "FAIL") << "  " << c.name;
    if (!c.detail.empty()) out << "  (" << c.detail << ")";
    out << '\n';
  }
  out << (report.all_passed() ? "all checks passed" : "CHECKS FAILED") << '\n';
}

}  // namespace vvca::harness
