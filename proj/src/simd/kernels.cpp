#include "hfm/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "hfm/error.hpp"

namespace hfm::simd {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(HFM_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend best_available() noexcept {
  return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
}

Backend initial_backend() noexcept {
  if (const char* env = std::getenv("HFM_KERNELS")) {
    const std::string_view v(env);
    if (v == "scalar") return Backend::Scalar;
    if (v == "avx2" && cpu_has_avx2()) return Backend::Avx2;
  }
  return best_available();
}

std::atomic<Backend>& current() noexcept {
  static std::atomic<Backend> backend{initial_backend()};
  return backend;
}

}  // namespace

bool available(Backend backend) noexcept {
  return backend == Backend::Scalar || cpu_has_avx2();
}

const KernelTable& table(Backend backend) {
  switch (backend) {
    case Backend::Scalar:
      return detail::kScalarKernels;
    case Backend::Avx2:
#if defined(HFM_HAVE_AVX2_KERNELS)
      if (cpu_has_avx2()) return detail::kAvx2Kernels;
#endif
      break;
  }
  throw Error(ErrorCode::InvalidConfig, "kernel backend '" + std::string(name(backend)) +
                                            "' is not available on this machine");
}

Backend active_backend() noexcept { return current().load(std::memory_order_relaxed); }

const KernelTable& active() noexcept {
#if defined(HFM_HAVE_AVX2_KERNELS)
  if (active_backend() == Backend::Avx2) return detail::kAvx2Kernels;
#endif
  return detail::kScalarKernels;
}

void select(Backend backend) {
  if (!available(backend))
    throw Error(ErrorCode::InvalidConfig,
                "kernel backend '" + std::string(name(backend)) + "' is not available");
  current().store(backend, std::memory_order_relaxed);
}

void select(std::string_view which) {
  if (which == "auto")
    select(best_available());
  else if (which == "scalar")
    select(Backend::Scalar);
  else if (which == "avx2")
    select(Backend::Avx2);
  else
    throw Error(ErrorCode::InvalidConfig, "unknown kernel backend '" + std::string(which) + "'");
}

std::string_view name(Backend backend) noexcept {
  return backend == Backend::Avx2 ? "avx2" : "scalar";
}

}  // namespace hfm::simd
