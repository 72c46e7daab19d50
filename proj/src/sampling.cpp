#include "vvca/sampling.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "vvca/parallel.hpp"

namespace vvca {

namespace {

// Expands item values into the bundle table. values[S] equals the
// ascending-item left fold, bit-exactly: the recurrence removes the
// highest set bit, so values[S] = values[S \ msb] + item[msb].
void expand_additive(std::span<const double> item_values, int n_items,
                     std::span<double> row) {
  row[0] = 0.0;
  const std::uint32_t full = 1u << n_items;
  for (std::uint32_t b = 1; b < full; ++b) {
    const int msb = std::bit_width(b) - 1;
    row[b] = row[b & ~(1u << msb)] + item_values[msb];
  }
}

}  // namespace

ValuationProfile sample_profile(SettingId setting, AuctionSize size, Rng& rng) {
  size.validate();
  const std::uint32_t full = size.bundle_count();
  ValuationProfile p;
  p.size = size;
  p.additive = setting_is_additive(setting);
  p.values.resize(static_cast<std::size_t>(size.n_bidders) * full);

  std::vector<double> items(size.n_items);
  for (int i = 0; i < size.n_bidders; ++i) {
    const double hi = static_cast<double>(i + 1);  // 1-based bidder index
    for (int j = 0; j < size.n_items; ++j) {
      switch (setting) {
        case SettingId::A: items[j] = rng.uniform(); break;
        case SettingId::B: items[j] = rng.uniform(0.0, hi); break;
        case SettingId::C: items[j] = std::exp(rng.normal() / hi); break;
        case SettingId::D: items[j] = rng.uniform(1.0, 2.0); break;
      }
    }
    std::span<double> row{p.values.data() + static_cast<std::size_t>(i) * full, full};
    expand_additive(items, size.n_items, row);
    if (setting == SettingId::D) {
      for (std::uint32_t b = 1; b < full; ++b) {
        const double half = 0.5 * std::popcount(b);
        row[b] += rng.uniform(-half, half);
      }
    }
  }
  return p;
}

ValuationBatch sample_batch(SettingId setting, AuctionSize size, int count,
                            std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("batch count must be >= 1");
  size.validate();
  ValuationBatch batch;
  batch.size = size;
  batch.setting = setting;
  batch.seed = seed;
  batch.profiles.resize(count);
  const Rng root(seed);
  parallel_for(static_cast<std::size_t>(count), 64, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) {
      Rng stream = root.split(k);
      batch.profiles[k] = sample_profile(setting, size, stream);
    }
  });
  return batch;
}

namespace {
constexpr char kBatchMagic[8] = {'V', 'V', 'C', 'A', 'B', '0', '0', '1'};
}

void write_batch(const ValuationBatch& batch, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(kBatchMagic, sizeof(kBatchMagic));
  const std::uint8_t setting = static_cast<std::uint8_t>(batch.setting);
  const std::uint32_t n = batch.size.n_bidders;
  const std::uint32_t m = batch.size.n_items;
  const std::uint64_t count = batch.profiles.size();
  out.write(reinterpret_cast<const char*>(&setting), 1);
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&m), 4);
  out.write(reinterpret_cast<const char*>(&count), 8);
  out.write(reinterpret_cast<const char*>(&batch.seed), 8);
  for (const ValuationProfile& p : batch.profiles) {
    out.write(reinterpret_cast<const char*>(p.values.data()),
              static_cast<std::streamsize>(p.values.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

ValuationBatch read_batch(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kBatchMagic, sizeof(magic)) != 0) {
    throw std::runtime_error("not a batch file: " + path.string());
  }
  std::uint8_t setting;
  std::uint32_t n, m;
  std::uint64_t count, seed;
  in.read(reinterpret_cast<char*>(&setting), 1);
  in.read(reinterpret_cast<char*>(&n), 4);
  in.read(reinterpret_cast<char*>(&m), 4);
  in.read(reinterpret_cast<char*>(&count), 8);
  in.read(reinterpret_cast<char*>(&seed), 8);
  if (!in) throw std::runtime_error("truncated batch header: " + path.string());

  ValuationBatch batch;
  batch.setting = static_cast<SettingId>(setting);
  batch.size = {static_cast<int>(n), static_cast<int>(m)};
  batch.size.validate();
  batch.seed = seed;
  batch.profiles.resize(count);
  const std::size_t table = static_cast<std::size_t>(n) * (1u << m);
  for (ValuationProfile& p : batch.profiles) {
    p.size = batch.size;
    p.additive = setting_is_additive(batch.setting);
    p.values.resize(table);
    in.read(reinterpret_cast<char*>(p.values.data()),
            static_cast<std::streamsize>(table * sizeof(double)));
  }
  if (!in) throw std::runtime_error("truncated batch data: " + path.string());
  return batch;
}

}  // namespace vvca
