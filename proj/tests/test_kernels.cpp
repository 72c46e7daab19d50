#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "vvca/kernels/dp_kernels.hpp"
#include "vvca/rng.hpp"

using namespace vvca;
using kernels::kLanes;

namespace {

// Reference cell evaluation, written independently of the kernel loop
// structure: explicit submask list, explicit tie rule.
void reference_cell(const double* prev, const double* score, bool broadcast, std::uint32_t s,
                    double* best_out, std::int64_t* idx_out) {
  for (int l = 0; l < kLanes; ++l) {
    double best = -std::numeric_limits<double>::infinity();
    std::int64_t idx = 0;
    std::uint32_t b = s;
    while (true) {
      const double sc = broadcast ? score[b] : score[std::size_t{b} * kLanes + l];
      const double cand = prev[std::size_t{s ^ b} * kLanes + l] + sc;
      if (cand > best || (cand == best && b < static_cast<std::uint32_t>(idx))) {
        best = cand;
        idx = b;
      }
      if (b == 0) break;
      b = (b - 1) & s;
    }
    best_out[l] = best;
    idx_out[l] = idx;
  }
}

struct LayerData {
  int m;
  std::vector<double> prev, score, lam;
};

LayerData random_layer(Rng& rng, int m, bool quantized) {
  LayerData d;
  d.m = m;
  const std::uint32_t full = 1u << m;
  d.prev.resize(std::size_t{full} * kLanes);
  d.score.resize(std::size_t{full} * kLanes);
  d.lam.resize(full);
  auto draw = [&](double& x) {
    x = rng.uniform(-2.0, 2.0);
    if (quantized) x = std::round(x * 4.0) / 4.0;
  };
  for (double& x : d.prev) draw(x);
  for (double& x : d.score) draw(x);
  for (double& x : d.lam) draw(x);
  return d;
}

}  // namespace

TEST_CASE("every available kernel matches the reference cell semantics") {
  Rng rng(314);
  const auto variants = kernels::available_kernels();
  REQUIRE(!variants.empty());
  CHECK(std::string(variants.front()->name) == "scalar");

  for (int trial = 0; trial < 40; ++trial) {
    const int m = 1 + static_cast<int>(rng.next_u64() % 6);
    const LayerData d = random_layer(rng, m, trial % 2 == 0);
    const std::uint32_t full = 1u << m;

    std::vector<double> want_maw(std::size_t{full} * kLanes);
    std::vector<std::int64_t> want_idx(std::size_t{full} * kLanes);
    for (std::uint32_t s = 0; s < full; ++s) {
      reference_cell(d.prev.data(), d.score.data(), false, s,
                     want_maw.data() + std::size_t{s} * kLanes,
                     want_idx.data() + std::size_t{s} * kLanes);
    }
    std::vector<double> got_maw(want_maw.size());
    std::vector<std::int64_t> got_idx(want_idx.size());
    for (const auto* k : variants) {
      const std::uint64_t ops =
          k->layer_vec(d.prev.data(), d.score.data(), m, got_maw.data(), got_idx.data());
      CHECK(std::memcmp(got_maw.data(), want_maw.data(), got_maw.size() * 8) == 0);
      CHECK(std::memcmp(got_idx.data(), want_idx.data(), got_idx.size() * 8) == 0);
      // Instrumented count: sum over pools of 2^popcount = 3^m.
      std::uint64_t pow3 = 1;
      for (int j = 0; j < m; ++j) pow3 *= 3;
      CHECK(ops == pow3);
    }

    for (std::uint32_t s = 0; s < full; ++s) {
      reference_cell(d.prev.data(), d.lam.data(), true, s,
                     want_maw.data() + std::size_t{s} * kLanes,
                     want_idx.data() + std::size_t{s} * kLanes);
    }
    for (const auto* k : variants) {
      k->layer_bcast(d.prev.data(), d.lam.data(), m, got_maw.data(), got_idx.data());
      CHECK(std::memcmp(got_maw.data(), want_maw.data(), got_maw.size() * 8) == 0);
      CHECK(std::memcmp(got_idx.data(), want_idx.data(), got_idx.size() * 8) == 0);
    }
  }
}

TEST_CASE("init layers copy or broadcast and count 2^m") {
  Rng rng(6);
  const LayerData d = random_layer(rng, 5, false);
  const std::uint32_t full = 1u << 5;
  std::vector<double> out(std::size_t{full} * kLanes);
  for (const auto* k : kernels::available_kernels()) {
    CHECK(k->init_vec(d.score.data(), 5, out.data()) == full);
    CHECK(std::memcmp(out.data(), d.score.data(), out.size() * 8) == 0);
    CHECK(k->init_bcast(d.lam.data(), 5, out.data()) == full);
    for (std::uint32_t s = 0; s < full; ++s) {
      for (int l = 0; l < kLanes; ++l) CHECK(out[std::size_t{s} * kLanes + l] == d.lam[s]);
    }
  }
}

TEST_CASE("kernel selection honors explicit names") {
  const auto variants = kernels::available_kernels();
  for (const auto* k : variants) {
    CHECK(kernels::set_active_kernels(k->name));
    CHECK(std::string(kernels::active_kernels().name) == k->name);
  }
  CHECK_FALSE(kernels::set_active_kernels("no_such_isa"));
  // Restore the widest variant for the rest of the suite.
  CHECK(kernels::set_active_kernels(variants.back()->name));
}
