#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "vvca/kernels/dp_kernels.hpp"

namespace vvca::kernels {

const DpLayerKernels* avx2_kernels_if_supported();
const DpLayerKernels* neon_kernels_if_supported();

std::vector<const DpLayerKernels*> available_kernels() {
  std::vector<const DpLayerKernels*> out{&scalar_kernels()};
  if (const DpLayerKernels* k = avx2_kernels_if_supported()) out.push_back(k);
  if (const DpLayerKernels* k = neon_kernels_if_supported()) out.push_back(k);
  return out;
}

namespace {

const DpLayerKernels* pick_default() {
  const DpLayerKernels* best = &scalar_kernels();
  for (const DpLayerKernels* k : available_kernels()) best = k;  // last = widest
  if (const char* env = std::getenv("VVCA_KERNEL")) {
    for (const DpLayerKernels* k : available_kernels()) {
      if (std::string_view(k->name) == env) return k;
    }
    throw std::runtime_error(std::string("VVCA_KERNEL names an unavailable kernel: ") + env);
  }
  return best;
}

std::atomic<const DpLayerKernels*> g_active{nullptr};

}  // namespace

const DpLayerKernels& active_kernels() {
  const DpLayerKernels* k = g_active.load(std::memory_order_acquire);
  if (k == nullptr) {
    k = pick_default();
    g_active.store(k, std::memory_order_release);
  }
  return *k;
}

bool set_active_kernels(std::string_view name) {
  for (const DpLayerKernels* k : available_kernels()) {
    if (name == k->name) {
      g_active.store(k, std::memory_order_release);
      return true;
    }
  }
  return false;
}

}  // namespace vvca::kernels
