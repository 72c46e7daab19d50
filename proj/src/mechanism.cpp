#include "vvca/mechanism.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "vvca/parallel.hpp"

namespace vvca {

std::vector<double> VvcaParams::weights() const {
  std::vector<double> w(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) w[i] = std::exp(alpha[i]);
  return w;
}

VvcaParams VvcaParams::zeros(AuctionSize size) {
  size.validate();
  VvcaParams p;
  p.size = size;
  p.alpha.assign(size.n_bidders, 0.0);
  p.lambda.assign(static_cast<std::size_t>(size.n_bidders) * size.bundle_count(), 0.0);
  return p;
}

void VvcaParams::validate() const {
  size.validate();
  if (alpha.size() != static_cast<std::size_t>(size.n_bidders) ||
      lambda.size() != static_cast<std::size_t>(size.n_bidders) * size.bundle_count()) {
    throw std::invalid_argument("params shape mismatch");
  }
  for (double a : alpha) {
    if (!std::isfinite(a)) throw std::invalid_argument("alpha entries must be finite");
  }
  for (double l : lambda) {
    if (!std::isfinite(l)) throw std::invalid_argument("lambda entries must be finite");
  }
}

}  // namespace vvca

namespace vvca::mechanism {

ValuationProfile zero_bidder(const ValuationProfile& profile, int bidder) {
  if (bidder < 0 || bidder >= profile.size.n_bidders) {
    throw std::out_of_range("bidder index out of range");
  }
  ValuationProfile out = profile;
  const std::uint32_t full = profile.size.bundle_count();
  std::fill_n(out.values.begin() + static_cast<std::size_t>(bidder) * full, full, 0.0);
  return out;
}

namespace {

// Assembles one outcome from the n+1 solver results. `removed_maw[i]`
// is the affine-welfare maximum with bidder i's valuation removed but
// every boost still active.
AuctionOutcome assemble_outcome(const ValuationProfile& profile, const VvcaParams& params,
                                const std::vector<double>& weights,
                                std::span<const BundleMask> winning,
                                double maw_star,
                                std::span<const double> removed_maw) {
  const int n = profile.size.n_bidders;
  AuctionOutcome out;
  out.allocation.bundles.assign(winning.begin(), winning.end());
  out.payments.resize(n);

  double z = 0.0;
  double f = 0.0;
  double revenue = 0.0;
  for (int i = 0; i < n; ++i) {
    // sum_{j != i} w_j v_j(A*) + lambda(A*): drop only bidder i's
    // weighted valuation, keep all boosts including lambda_i.
    double bracket = 0.0;
    for (int j = 0; j < n; ++j) {
      const BundleMask b = winning[j];
      bracket += (j == i ? params.lambda_at(j, b)
                         : weights[j] * profile.value(j, b) + params.lambda_at(j, b));
    }
    const double pay = (removed_maw[i] - bracket) / weights[i];
    out.payments[i] = pay;
    revenue += pay;
    z += profile.value(i, winning[i]);
    f += (removed_maw[i] - maw_star) / weights[i];
  }
  out.revenue = revenue;
  out.welfare_z = z;
  out.continuous_f = f;
  return out;
}

}  // namespace

AuctionOutcome run_auction(const ValuationProfile& profile, const VvcaParams& params) {
  if (profile.size != params.size) throw std::invalid_argument("shape mismatch");
  const int n = profile.size.n_bidders;
  const std::vector<double> weights = params.weights();
  const winner::WinnerResult main = winner::solve_winner(profile, params);
  std::vector<double> removed_maw(n);
  for (int i = 0; i < n; ++i) {
    removed_maw[i] = winner::solve_winner(profile, params, i).max_affine_welfare;
  }
  return assemble_outcome(profile, params, weights, main.allocation.bundles,
                          main.max_affine_welfare, removed_maw);
}

std::vector<AuctionOutcome> run_auction_batch(const ValuationBatch& batch,
                                              const VvcaParams& params) {
  const int n = batch.size.n_bidders;
  const std::size_t count = batch.profiles.size();
  winner::BatchWinnerEngine engine(batch);
  engine.prepare(params);

  std::vector<BundleMask> main_alloc(count * n);
  std::vector<double> main_maw(count);
  engine.solve(-1, main_alloc, main_maw);

  std::vector<std::vector<double>> removed_maw(n, std::vector<double>(count));
  std::vector<BundleMask> scratch_alloc(count * n);
  for (int i = 0; i < n; ++i) {
    engine.solve(i, scratch_alloc, removed_maw[i]);
  }

  const std::vector<double> weights = params.weights();
  std::vector<AuctionOutcome> out(count);
  parallel_for(count, 256, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> rm(n);
    for (std::size_t p = lo; p < hi; ++p) {
      for (int i = 0; i < n; ++i) rm[i] = removed_maw[i][p];
      out[p] = assemble_outcome(batch.profiles[p], params, weights,
                                {main_alloc.data() + p * n, static_cast<std::size_t>(n)},
                                main_maw[p], rm);
    }
  });
  return out;
}

RevenueBreakdown revenue_breakdown_batch(const ValuationBatch& batch,
                                         const VvcaParams& params) {
  if (batch.profiles.empty()) throw std::invalid_argument("empty batch");
  const std::vector<AuctionOutcome> outcomes = run_auction_batch(batch, params);
  const std::size_t count = outcomes.size();
  std::vector<double> r(count), z(count), f(count);
  for (std::size_t p = 0; p < count; ++p) {
    r[p] = outcomes[p].revenue;
    z[p] = outcomes[p].welfare_z;
    f[p] = outcomes[p].continuous_f;
  }
  RevenueBreakdown b;
  b.r_mean = block_pairwise_sum(r.data(), count) / static_cast<double>(count);
  b.z_mean = block_pairwise_sum(z.data(), count) / static_cast<double>(count);
  b.f_mean = block_pairwise_sum(f.data(), count) / static_cast<double>(count);
  return b;
}

double mean_social_welfare(const ValuationBatch& batch, const VvcaParams& params) {
  const int n = batch.size.n_bidders;
  const std::size_t count = batch.profiles.size();
  winner::BatchWinnerEngine engine(batch);
  engine.prepare(params);
  std::vector<BundleMask> alloc(count * n);
  std::vector<double> maw(count);
  engine.solve(-1, alloc, maw);
  std::vector<double> z(count);
  for (std::size_t p = 0; p < count; ++p) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += batch.profiles[p].value(i, alloc[p * n + i]);
    z[p] = acc;
  }
  return block_pairwise_sum(z.data(), count) / static_cast<double>(count);
}

double utility(const ValuationProfile& true_profile, const ValuationProfile& reported,
               const VvcaParams& params, int bidder) {
  if (true_profile.size != reported.size) throw std::invalid_argument("shape mismatch");
  if (bidder < 0 || bidder >= true_profile.size.n_bidders) {
    throw std::out_of_range("bidder index out of range");
  }
  const AuctionOutcome outcome = run_auction(reported, params);
  return true_profile.value(bidder, outcome.allocation.bundles[bidder]) -
         outcome.payments[bidder];
}

void save_params(const VvcaParams& params, const std::filesystem::path& path,
                 std::optional<SettingId> setting,
                 std::optional<std::uint64_t> created_from_seed) {
  params.validate();
  nlohmann::json j;
  j["n"] = params.size.n_bidders;
  j["m"] = params.size.n_items;
  j["alpha"] = params.alpha;
  std::vector<std::vector<double>> rows(params.size.n_bidders);
  const std::uint32_t full = params.size.bundle_count();
  for (int i = 0; i < params.size.n_bidders; ++i) {
    rows[i].assign(params.lambda.begin() + static_cast<std::size_t>(i) * full,
                   params.lambda.begin() + static_cast<std::size_t>(i + 1) * full);
  }
  j["lambda"] = rows;
  j["setting_id"] = setting ? to_string(*setting) : "";
  if (created_from_seed) {
    j["created_from_seed"] = *created_from_seed;
  } else {
    j["created_from_seed"] = nullptr;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

VvcaParams load_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  nlohmann::json j = nlohmann::json::parse(in);
  VvcaParams p;
  p.size = {j.at("n").get<int>(), j.at("m").get<int>()};
  p.alpha = j.at("alpha").get<std::vector<double>>();
  const auto rows = j.at("lambda").get<std::vector<std::vector<double>>>();
  p.lambda.reserve(static_cast<std::size_t>(p.size.n_bidders) * p.size.bundle_count());
  for (const auto& row : rows) p.lambda.insert(p.lambda.end(), row.begin(), row.end());
  p.validate();
  return p;
}

}  // namespace vvca::mechanism
