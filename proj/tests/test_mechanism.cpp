#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "vvca/mechanism.hpp"
#include "vvca/rng.hpp"
#include "vvca/sampling.hpp"

using namespace vvca;

namespace {

ValuationProfile additive_profile(const std::vector<std::vector<double>>& item_values) {
  const int n = static_cast<int>(item_values.size());
  const int m = static_cast<int>(item_values[0].size());
  ValuationProfile p = ValuationProfile::zeros({n, m});
  for (int i = 0; i < n; ++i) {
    for (BundleMask b = 1; b < (1u << m); ++b) {
      double sum = 0.0;
      for (int j = 0; j < m; ++j) {
        if (b & (1u << j)) sum += item_values[i][j];
      }
      p.value(i, b) = sum;
    }
  }
  return p;
}

VvcaParams random_params(AuctionSize size, Rng& rng) {
  VvcaParams p = VvcaParams::zeros(size);
  for (double& a : p.alpha) a = rng.uniform(-1.0, 1.0);
  for (double& l : p.lambda) l = rng.uniform(-1.0, 1.0);
  return p;
}

}  // namespace

TEST_CASE("zero_bidder zeroes one row, idempotently") {
  Rng rng(1);
  const ValuationProfile p = sample_profile(SettingId::B, {3, 3}, rng);
  const ValuationProfile z = mechanism::zero_bidder(p, 1);
  for (BundleMask b = 0; b < 8; ++b) {
    CHECK(z.value(1, b) == 0.0);
    CHECK(z.value(0, b) == p.value(0, b));
    CHECK(z.value(2, b) == p.value(2, b));
  }
  const ValuationProfile zz = mechanism::zero_bidder(z, 1);
  CHECK(zz.values == z.values);
  CHECK_THROWS_AS(mechanism::zero_bidder(p, 3), std::out_of_range);
}

TEST_CASE("hand-evaluated 2x2 auction under VCG parameters") {
  const ValuationProfile p = additive_profile({{0.8, 0.2}, {0.5, 0.6}});
  const auto out = mechanism::run_auction(p, VvcaParams::zeros({2, 2}));
  CHECK(out.allocation.bundles == std::vector<BundleMask>{0b01, 0b10});
  CHECK(out.payments[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(out.payments[1] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(out.revenue == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(out.welfare_z == doctest::Approx(1.4).epsilon(1e-12));
  CHECK(out.continuous_f == doctest::Approx(-0.7).epsilon(1e-12));
}

TEST_CASE("single bidder pays nothing under VCG") {
  Rng rng(2);
  const ValuationProfile p = sample_profile(SettingId::A, {1, 3}, rng);
  const auto out = mechanism::run_auction(p, VvcaParams::zeros({1, 3}));
  CHECK(out.payments[0] == 0.0);
  CHECK(out.revenue == 0.0);
}

TEST_CASE("removed-bidder maximum keeps the removed bidder's boosts") {
  // Single bidder, boosts on: the removed-bidder max is max_S lambda(S)
  // (every bundle may still be granted, valued at zero but boosted), so
  // the payment is max_S lambda(S) - lambda(A*). This pins the literal
  // reading of the payment rule.
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    Rng t = rng.split(trial);
    const AuctionSize size{1, 3};
    const ValuationProfile p = sample_profile(SettingId::A, size, t);
    VvcaParams params = VvcaParams::zeros(size);
    params.lambda[0] = 0.0;  // keep v(empty)=0 slot boost-free
    for (std::size_t k = 1; k < params.lambda.size(); ++k) {
      params.lambda[k] = t.uniform(-1.0, 1.0);
    }
    const auto out = mechanism::run_auction(p, params);
    const double lambda_max = *std::max_element(params.lambda.begin(), params.lambda.end());
    const double expect =
        std::max(lambda_max, 0.0) - params.lambda_at(0, out.allocation.bundles[0]);
    CHECK(out.payments[0] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("zeroing a bidder makes affine welfare boost-only (n=1)") {
  Rng rng(4);
  const ValuationProfile p = sample_profile(SettingId::A, {1, 2}, rng);
  VvcaParams params = VvcaParams::zeros({1, 2});
  params.lambda = {0.0, 0.3, -0.2, 0.7};
  const ValuationProfile z = mechanism::zero_bidder(p, 0);
  for (BundleMask b = 0; b < 4; ++b) {
    winner::Allocation alloc{{b}};
    CHECK(winner::affine_welfare(z, params, alloc) == params.lambda_at(0, b));
  }
}

TEST_CASE("structural identities on random instances") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    Rng t = rng.split(trial);
    const SettingId setting = static_cast<SettingId>(trial % 4);
    const AuctionSize size{1 + static_cast<int>(t.next_u64() % 3),
                           1 + static_cast<int>(t.next_u64() % 3)};
    const ValuationProfile profile = sample_profile(setting, size, t);
    const VvcaParams params = random_params(size, t);
    const auto out = mechanism::run_auction(profile, params);

    double pay_sum = 0.0;
    for (double p : out.payments) {
      CHECK(p >= -1e-12);
      pay_sum += p;
    }
    CHECK(std::abs(out.revenue - pay_sum) <= 1e-9 * std::max(1.0, std::abs(out.revenue)));
    CHECK(std::abs(out.revenue - (out.welfare_z + out.continuous_f)) <=
          1e-9 * std::max(1.0, std::abs(out.revenue)));

    for (double c : {0.5, 2.0, 10.0}) {
      VvcaParams scaled = params;
      for (double& a : scaled.alpha) a += std::log(c);
      for (double& l : scaled.lambda) l *= c;
      const auto out2 = mechanism::run_auction(profile, scaled);
      CHECK(std::abs(out2.revenue - out.revenue) <=
            1e-9 * std::max(1.0, std::abs(out.revenue)));
      for (int i = 0; i < size.n_bidders; ++i) {
        CHECK(std::abs(out2.payments[i] - out.payments[i]) <=
              1e-9 * std::max(1.0, std::abs(out.payments[i])));
      }
    }
  }
}

TEST_CASE("utility: truthful reporting is individually rational") {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    Rng t = rng.split(trial);
    const AuctionSize size{2, 3};
    const ValuationProfile profile = sample_profile(SettingId::A, size, t);
    const VvcaParams params = random_params(size, t);
    for (int i = 0; i < size.n_bidders; ++i) {
      CHECK(mechanism::utility(profile, profile, params, i) >= -1e-9);
    }
  }
}

TEST_CASE("utility: single bidder with zero boosts never pays") {
  Rng rng(7);
  const AuctionSize size{1, 2};
  const ValuationProfile truth = sample_profile(SettingId::A, size, rng);
  const ValuationProfile report = sample_profile(SettingId::A, size, rng);
  const VvcaParams vcg = VvcaParams::zeros(size);
  const auto out = mechanism::run_auction(report, vcg);
  CHECK(out.payments[0] == 0.0);
  const double u = mechanism::utility(truth, report, vcg, 0);
  CHECK(u == truth.value(0, out.allocation.bundles[0]));
  CHECK(u >= 0.0);
}

TEST_CASE("misreports do not beat truth (sampling)") {
  Rng rng(8);
  for (int trial = 0; trial < 400; ++trial) {
    Rng t = rng.split(trial);
    const AuctionSize size = trial % 2 == 0 ? AuctionSize{2, 3} : AuctionSize{3, 3};
    const ValuationProfile truth = sample_profile(SettingId::A, size, t);
    const VvcaParams params = random_params(size, t);
    const int bidder = static_cast<int>(t.next_u64() % size.n_bidders);
    const double truthful = mechanism::utility(truth, truth, params, bidder);

    ValuationProfile mis = truth;
    const std::uint32_t bundle =
        1 + static_cast<std::uint32_t>(t.next_u64() % (size.bundle_count() - 1));
    mis.value(bidder, bundle) = t.uniform(0.0, 3.0);
    mis.additive = false;
    CHECK(mechanism::utility(truth, mis, params, bidder) <= truthful + 1e-9);
  }
}

TEST_CASE("revenue breakdown: singleton batch equals run_auction") {
  Rng rng(9);
  const AuctionSize size{2, 3};
  ValuationBatch batch;
  batch.size = size;
  batch.setting = SettingId::A;
  batch.profiles.push_back(sample_profile(SettingId::A, size, rng));
  const VvcaParams params = random_params(size, rng);
  const auto breakdown = mechanism::revenue_breakdown_batch(batch, params);
  const auto out = mechanism::run_auction(batch.profiles[0], params);
  CHECK(breakdown.r_mean == out.revenue);
  CHECK(breakdown.z_mean == out.welfare_z);
  CHECK(breakdown.f_mean == out.continuous_f);
  CHECK(std::abs(breakdown.r_mean - (breakdown.z_mean + breakdown.f_mean)) <=
        1e-9 * std::max(1.0, std::abs(breakdown.r_mean)));
}

TEST_CASE("VCG revenue on 2x2 uniform approaches 2/3") {
  const ValuationBatch batch = sample_batch(SettingId::A, {2, 2}, 200000, 4242);
  const auto b = mechanism::revenue_breakdown_batch(batch, VvcaParams::zeros({2, 2}));
  CHECK(std::abs(b.r_mean - 2.0 / 3.0) < 0.01);
  CHECK(std::abs(b.r_mean - (b.z_mean + b.f_mean)) <= 1e-9);
}

TEST_CASE("bidder-permuted batch permutes payments under symmetric params") {
  const AuctionSize size{2, 3};
  ValuationBatch batch = sample_batch(SettingId::A, size, 64, 31);
  ValuationBatch swapped = batch;
  const std::uint32_t full = size.bundle_count();
  for (auto& p : swapped.profiles) {
    for (std::uint32_t b = 0; b < full; ++b) std::swap(p.value(0, b), p.value(1, b));
  }
  VvcaParams params = VvcaParams::zeros(size);  // symmetric across bidders
  Rng rng(10);
  for (std::uint32_t b = 0; b < full; ++b) {
    const double boost = rng.uniform(-0.5, 0.5);
    params.lambda_at(0, b) = boost;
    params.lambda_at(1, b) = boost;
  }
  const auto a = mechanism::run_auction_batch(batch, params);
  const auto s = mechanism::run_auction_batch(swapped, params);
  for (std::size_t p = 0; p < a.size(); ++p) {
    CHECK(a[p].payments[0] == doctest::Approx(s[p].payments[1]).epsilon(1e-12));
    CHECK(a[p].payments[1] == doctest::Approx(s[p].payments[0]).epsilon(1e-12));
    CHECK(a[p].revenue == doctest::Approx(s[p].revenue).epsilon(1e-12));
  }
}

TEST_CASE("parameter files survive a round trip exactly") {
  namespace fs = std::filesystem;
  Rng rng(11);
  VvcaParams p = VvcaParams::zeros({3, 4});
  for (double& a : p.alpha) a = rng.normal() * 3.0;
  for (double& l : p.lambda) l = rng.normal() / 7.0;
  const auto path = fs::temp_directory_path() / "vvca_test_params.json";
  mechanism::save_params(p, path, SettingId::C, 987654321);
  const VvcaParams q = mechanism::load_params(path);
  CHECK(q.size == p.size);
  CHECK(q.alpha == p.alpha);    // value-exact round trip
  CHECK(q.lambda == p.lambda);
  fs::remove(path);
}

TEST_CASE("shape mismatches are rejected") {
  Rng rng(12);
  const ValuationProfile p = sample_profile(SettingId::A, {2, 2}, rng);
  CHECK_THROWS_AS(mechanism::run_auction(p, VvcaParams::zeros({2, 3})),
                  std::invalid_argument);
  const ValuationProfile q = sample_profile(SettingId::A, {2, 3}, rng);
  CHECK_THROWS_AS(mechanism::utility(p, q, VvcaParams::zeros({2, 2}), 0),
                  std::invalid_argument);
}
