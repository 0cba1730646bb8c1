#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "hfm/nn/params.hpp"

namespace hfm::nn {

enum class OptimizerKind { Sgd, Adam };

std::string_view to_string(OptimizerKind kind) noexcept;
OptimizerKind parse_optimizer(std::string_view name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Adam;
  double learning_rate = 0.005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  friend bool operator==(const OptimizerConfig&, const OptimizerConfig&) = default;
};

/// SGD: w <- w - lr * g.
/// Adam: bias-corrected first/second moments,
///   w <- w - lr * m_hat / (sqrt(v_hat) + eps).
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config) : config_(config) {}

  /// Throws LayoutMismatch if `grad` is not congruent with `params` or with
  /// the layout seen on the first step.
  void step(ParamSet& params, const Gradient& grad);

  std::size_t steps_taken() const noexcept { return t_; }
  const OptimizerConfig& config() const noexcept { return config_; }

 private:
  OptimizerConfig config_;
  std::size_t t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

}  // namespace hfm::nn
