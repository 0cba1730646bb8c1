#pragma once

#include <cstddef>
#include <span>
#include <string_view>

/// Dense linear-algebra primitives behind the network layers.
///
/// Every primitive has a portable scalar reference implementation and, on
/// x86-64 builds, an AVX2 variant. The variant is chosen once at runtime
/// from CPU support and can be overridden with select() or the
/// HFM_KERNELS environment variable ("scalar", "avx2", "auto").
///
/// Element-wise primitives (axpy, ger_acc, gemv_t_acc, adam_update) are
/// bit-identical across backends. Reductions (dot, gemv) use four-lane
/// partial sums on AVX2, so their results match the scalar reference only
/// to rounding; the scalar backend is the cross-platform reference.
namespace hfm::simd {

enum class Backend { Scalar, Avx2 };

struct AdamCoefficients {
  double learning_rate;
  double beta1;
  double beta2;
  double epsilon;
  double bias_correction1;  // 1 - beta1^t
  double bias_correction2;  // 1 - beta2^t
};

struct KernelTable {
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = W x + b, W row-major rows x cols; b may be null
  void (*gemv)(const double* w, std::size_t rows, std::size_t cols, const double* x,
               const double* b, double* y);
  // dx += W^T dy
  void (*gemv_t_acc)(const double* w, std::size_t rows, std::size_t cols, const double* dy,
                     double* dx);
  // dW += dy x^T
  void (*ger_acc)(double* dw, std::size_t rows, std::size_t cols, const double* dy,
                  const double* x);
  void (*adam_update)(double* w, double* m, double* v, const double* g, std::size_t n,
                      const AdamCoefficients& c);
};

bool available(Backend backend) noexcept;
const KernelTable& table(Backend backend);

/// Backend used by the free functions below.
Backend active_backend() noexcept;
const KernelTable& active() noexcept;

/// Throws hfm::Error(InvalidConfig) if the backend is not available.
void select(Backend backend);
/// "auto" | "scalar" | "avx2"
void select(std::string_view name);
std::string_view name(Backend backend) noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

namespace detail {
extern const KernelTable kScalarKernels;
#if defined(HFM_HAVE_AVX2_KERNELS)
extern const KernelTable kAvx2Kernels;
#endif
}  // namespace detail

}  // namespace hfm::simd
