#pragma once

#include <span>
#include <vector>

#include "hfm/nn/network.hpp"

namespace hfm::nn {

struct LossResult {
  double value = 0.0;
  std::vector<double> gradient;  // dJ/dpred
};

/// J = mean((pred - target)^2), dJ/dpred = 2 (pred - target) / n.
LossResult mse_loss(std::span<const double> pred, std::span<const double> target);

/// Full-batch forward, loss and BPTT. `grad` is overwritten. If `outputs`
/// is non-null it receives the per-step predictions.
double loss_and_gradient(const Network& net, const ParamSet& params, const Sequence& inputs,
                         std::span<const double> targets, Gradient& grad,
                         std::vector<double>* outputs = nullptr);

/// Forward and loss only.
double loss_only(const Network& net, const ParamSet& params, const Sequence& inputs,
                 std::span<const double> targets);

}  // namespace hfm::nn
