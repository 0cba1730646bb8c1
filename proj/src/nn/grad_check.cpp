#include "hfm/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "hfm/nn/loss.hpp"

namespace hfm::nn {

GradCheckResult grad_check(const NetworkSpec& spec, const ParamSet& params,
                           const Sequence& inputs, std::span<const double> targets,
                           double step) {
  const Network net(spec);
  Gradient analytic = Gradient::zeros_like(params);
  loss_and_gradient(net, params, inputs, targets, analytic);

  ParamSet probe = params;
  GradCheckResult result;
  auto values = probe.values();
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double saved = values[k];
    values[k] = saved + step;
    const double up = loss_only(net, probe, inputs, targets);
    values[k] = saved - step;
    const double down = loss_only(net, probe, inputs, targets);
    values[k] = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double a = analytic.values()[k];
    const double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-8});
    const double err = std::fabs(a - numeric) / denom;
    if (k == 0 || err > result.max_relative_error) {
      result.max_relative_error = err;
      result.worst_index = k;
      result.analytic_at_worst = a;
      result.numeric_at_worst = numeric;
    }
  }
  return result;
}

}  // namespace hfm::nn
