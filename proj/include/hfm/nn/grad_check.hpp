#pragma once

#include <cstddef>
#include <span>

#include "hfm/nn/network.hpp"

namespace hfm::nn {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
  double analytic_at_worst = 0.0;
  double numeric_at_worst = 0.0;
};

/// Compares BPTT gradients of the MSE loss with central differences:
///   err_k = |a_k - n_k| / max(|a_k|, |n_k|, 1e-8)
/// and reports the maximum over all parameters.
GradCheckResult grad_check(const NetworkSpec& spec, const ParamSet& params,
                           const Sequence& inputs, std::span<const double> targets,
                           double step = 1e-5);

}  // namespace hfm::nn
