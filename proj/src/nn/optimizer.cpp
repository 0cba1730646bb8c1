#include "hfm/nn/optimizer.hpp"

#include <cmath>
#include <string>

#include "hfm/error.hpp"
#include "hfm/simd/kernels.hpp"

namespace hfm::nn {

std::string_view to_string(OptimizerKind kind) noexcept {
  return kind == OptimizerKind::Sgd ? "sgd" : "adam";
}

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "sgd") return OptimizerKind::Sgd;
  if (name == "adam") return OptimizerKind::Adam;
  throw Error(ErrorCode::InvalidConfig, "unknown optimizer '" + std::string(name) + "'");
}

void Optimizer::step(ParamSet& params, const Gradient& grad) {
  if (!grad.congruent(params))
    throw Error(ErrorCode::LayoutMismatch, "gradient layout does not match parameters");
  if (t_ > 0 && m_.size() != params.size())
    throw Error(ErrorCode::LayoutMismatch, "optimizer state belongs to another layout");
  const auto& k = simd::active();
  auto w = params.values();
  const auto g = grad.values();
  ++t_;
  if (config_.kind == OptimizerKind::Sgd) {
    if (m_.empty()) m_.resize(w.size());  // marks the layout
    k.axpy(-config_.learning_rate, g.data(), w.data(), w.size());
    return;
  }
  if (m_.empty()) {
    m_.assign(w.size(), 0.0);
    v_.assign(w.size(), 0.0);
  }
  const double t = static_cast<double>(t_);
  const simd::AdamCoefficients c{config_.learning_rate, config_.beta1, config_.beta2,
                                 config_.epsilon, 1.0 - std::pow(config_.beta1, t),
                                 1.0 - std::pow(config_.beta2, t)};
  k.adam_update(w.data(), m_.data(), v_.data(), g.data(), w.size(), c);
}

}  // namespace hfm::nn
