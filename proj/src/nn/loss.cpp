#include "hfm/nn/loss.hpp"

#include <string>

#include "hfm/error.hpp"

namespace hfm::nn {

LossResult mse_loss(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size())
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(pred.size()) + " predictions vs " +
                    std::to_string(target.size()) + " targets");
  if (pred.empty()) throw Error(ErrorCode::EmptyInput, "mse of an empty sequence");
  const double n = static_cast<double>(pred.size());
  LossResult r;
  r.gradient.resize(pred.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = pred[i] - target[i];
    sum += e * e;
    r.gradient[i] = 2.0 * e / n;
  }
  r.value = sum / n;
  return r;
}

double loss_and_gradient(const Network& net, const ParamSet& params, const Sequence& inputs,
                         std::span<const double> targets, Gradient& grad,
                         std::vector<double>* outputs) {
  Tape tape;
  std::vector<double> pred = net.forward(params, inputs, tape);
  LossResult loss = mse_loss(pred, targets);
  grad.fill(0.0);
  net.backward(params, tape, loss.gradient, grad);
  if (outputs) *outputs = std::move(pred);
  return loss.value;
}

double loss_only(const Network& net, const ParamSet& params, const Sequence& inputs,
                 std::span<const double> targets) {
  return mse_loss(net.forward(params, inputs), targets).value;
}

}  // namespace hfm::nn
