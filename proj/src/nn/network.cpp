#include "hfm/nn/network.hpp"

#include <algorithm>
#include <string>

#include "hfm/error.hpp"

namespace hfm::nn {

DenseWeights<const double> dense_weights(const FlatTensor& p, const NetworkSpec& spec,
                                         std::size_t i) {
  return {p.block(i, "W"), p.block(i, "b"), spec.fan_in(i), spec.layers[i].width};
}
DenseWeights<double> dense_weights(FlatTensor& p, const NetworkSpec& spec, std::size_t i) {
  return {p.block(i, "W"), p.block(i, "b"), spec.fan_in(i), spec.layers[i].width};
}
LstmWeights<const double> lstm_weights(const FlatTensor& p, const NetworkSpec& spec,
                                       std::size_t i) {
  return {p.stacked(i, "W_f", 4), p.stacked(i, "b_f", 4), spec.fan_in(i), spec.layers[i].width};
}
LstmWeights<double> lstm_weights(FlatTensor& p, const NetworkSpec& spec, std::size_t i) {
  return {p.stacked(i, "W_f", 4), p.stacked(i, "b_f", 4), spec.fan_in(i), spec.layers[i].width};
}
GruWeights<const double> gru_weights(const FlatTensor& p, const NetworkSpec& spec,
                                     std::size_t i) {
  return {p.stacked(i, "W_r", 3), p.stacked(i, "b_r", 3), spec.fan_in(i), spec.layers[i].width};
}
GruWeights<double> gru_weights(FlatTensor& p, const NetworkSpec& spec, std::size_t i) {
  return {p.stacked(i, "W_r", 3), p.stacked(i, "b_r", 3), spec.fan_in(i), spec.layers[i].width};
}

namespace {

template <class V>
std::span<V> row(std::vector<std::remove_const_t<V>>& v, std::size_t t, std::size_t width) {
  return std::span<V>(v.data() + t * width, width);
}
template <class V>
std::span<const V> row(const std::vector<V>& v, std::size_t t, std::size_t width) {
  return std::span<const V>(v.data() + t * width, width);
}

}  // namespace

Network::Network(NetworkSpec spec) : spec_(std::move(spec)) { validate(spec_); }

std::vector<double> Network::forward(const ParamSet& params, const Sequence& inputs) const {
  Tape tape;
  return forward(params, inputs, tape);
}

std::vector<double> Network::forward(const ParamSet& params, const Sequence& inputs,
                                     Tape& tape) const {
  if (inputs.width != spec_.input_width)
    throw Error(ErrorCode::DimensionMismatch,
                "input width " + std::to_string(inputs.width) + ", network expects " +
                    std::to_string(spec_.input_width));
  if (params.size() != parameter_count(spec_))
    throw Error(ErrorCode::LayoutMismatch, "parameter count does not match the network");
  const std::size_t steps = inputs.steps;
  tape.steps = steps;
  tape.activations.resize(spec_.layers.size() + 1);
  tape.layers.resize(spec_.layers.size());
  tape.activations[0] = inputs.values;

  for (std::size_t l = 0; l < spec_.layers.size(); ++l) {
    const LayerSpec& layer = spec_.layers[l];
    const std::size_t in = spec_.fan_in(l);
    const std::size_t h = layer.width;
    const auto& x = tape.activations[l];
    auto& y = tape.activations[l + 1];
    auto& lt = tape.layers[l];
    y.assign(steps * h, 0.0);

    switch (layer.kind) {
      case LayerKind::Dense: {
        const auto w = dense_weights(params, spec_, l);
        lt.pre.assign(steps * h, 0.0);
        for (std::size_t t = 0; t < steps; ++t)
          dense_forward(w, layer.activation, row(x, t, in), row<double>(lt.pre, t, h),
                        row<double>(y, t, h));
        break;
      }
      case LayerKind::LSTM: {
        const auto w = lstm_weights(params, spec_, l);
        lt.concat.assign(steps * (h + in), 0.0);
        lt.pre.assign(steps * 4 * h, 0.0);
        lt.gates.assign(steps * 4 * h, 0.0);
        lt.cell.assign(steps * h, 0.0);
        lt.cell_act.assign(steps * h, 0.0);
        const std::vector<double> zero(h, 0.0);
        for (std::size_t t = 0; t < steps; ++t) {
          const auto h_prev = t ? row(std::as_const(y), t - 1, h) : std::span<const double>(zero);
          const auto c_prev =
              t ? row(std::as_const(lt.cell), t - 1, h) : std::span<const double>(zero);
          lstm_forward(w, layer.activation, row(x, t, in), h_prev, c_prev,
                       {row<double>(lt.concat, t, h + in), row<double>(lt.pre, t, 4 * h),
                        row<double>(lt.gates, t, 4 * h), row<double>(lt.cell, t, h),
                        row<double>(lt.cell_act, t, h), row<double>(y, t, h)});
        }
        break;
      }
      case LayerKind::GRU: {
        const auto w = gru_weights(params, spec_, l);
        lt.concat.assign(steps * (h + in), 0.0);
        lt.pre.assign(steps * 3 * h, 0.0);
        lt.gates.assign(steps * 2 * h, 0.0);
        lt.reset_concat.assign(steps * (h + in), 0.0);
        lt.candidate.assign(steps * h, 0.0);
        const std::vector<double> zero(h, 0.0);
        for (std::size_t t = 0; t < steps; ++t) {
          const auto h_prev = t ? row(std::as_const(y), t - 1, h) : std::span<const double>(zero);
          gru_forward(w, layer.activation, row(x, t, in), h_prev,
                      {row<double>(lt.concat, t, h + in), row<double>(lt.pre, t, 3 * h),
                       row<double>(lt.gates, t, 2 * h), row<double>(lt.reset_concat, t, h + in),
                       row<double>(lt.candidate, t, h), row<double>(y, t, h)});
        }
        break;
      }
    }
  }
  return tape.activations.back();
}

void Network::backward(const ParamSet& params, const Tape& tape,
                       std::span<const double> d_outputs, Gradient& grad) const {
  if (!grad.congruent(params))
    throw Error(ErrorCode::LayoutMismatch, "gradient layout does not match parameters");
  const std::size_t steps = tape.steps;
  if (d_outputs.size() != steps)
    throw Error(ErrorCode::DimensionMismatch, "output gradient length does not match tape");

  std::vector<double> d_out(d_outputs.begin(), d_outputs.end());
  std::vector<double> d_in;
  std::vector<double> scratch;

  for (std::size_t li = spec_.layers.size(); li-- > 0;) {
    const LayerSpec& layer = spec_.layers[li];
    const std::size_t in = spec_.fan_in(li);
    const std::size_t h = layer.width;
    const auto& x = tape.activations[li];
    const auto& y = tape.activations[li + 1];
    const auto& lt = tape.layers[li];
    // The network input needs no gradient.
    const bool need_dx = li > 0;
    d_in.assign(need_dx ? steps * in : 0, 0.0);
    auto dx_row = [&](std::size_t t) {
      return need_dx ? row<double>(d_in, t, in) : std::span<double>{};
    };

    switch (layer.kind) {
      case LayerKind::Dense: {
        const auto w = dense_weights(params, spec_, li);
        const auto g = dense_weights(grad, spec_, li);
        for (std::size_t t = 0; t < steps; ++t)
          dense_backward(w, layer.activation, row(x, t, in), row(lt.pre, t, h), row(y, t, h),
                         row(std::as_const(d_out), t, h), g, dx_row(t), scratch);
        break;
      }
      case LayerKind::LSTM: {
        const auto w = lstm_weights(params, spec_, li);
        const auto g = lstm_weights(grad, spec_, li);
        std::vector<double> dh(h), dh_next(h, 0.0), dc_next(h, 0.0), dh_prev(h), dc_prev(h);
        const std::vector<double> zero(h, 0.0);
        for (std::size_t t = steps; t-- > 0;) {
          for (std::size_t k = 0; k < h; ++k) dh[k] = d_out[t * h + k] + dh_next[k];
          const auto c_prev = t ? row(lt.cell, t - 1, h) : std::span<const double>(zero);
          const LstmStepView<const double> cache{row(lt.concat, t, h + in), row(lt.pre, t, 4 * h),
                                                 row(lt.gates, t, 4 * h), row(lt.cell, t, h),
                                                 row(lt.cell_act, t, h), row(y, t, h)};
          lstm_backward(w, layer.activation, cache, c_prev, dh, dc_next, g, dx_row(t), dh_prev,
                        dc_prev, scratch);
          dh_next.swap(dh_prev);
          dc_next.swap(dc_prev);
        }
        break;
      }
      case LayerKind::GRU: {
        const auto w = gru_weights(params, spec_, li);
        const auto g = gru_weights(grad, spec_, li);
        std::vector<double> dh(h), dh_next(h, 0.0), dh_prev(h);
        for (std::size_t t = steps; t-- > 0;) {
          for (std::size_t k = 0; k < h; ++k) dh[k] = d_out[t * h + k] + dh_next[k];
          const GruStepView<const double> cache{
              row(lt.concat, t, h + in), row(lt.pre, t, 3 * h), row(lt.gates, t, 2 * h),
              row(lt.reset_concat, t, h + in), row(lt.candidate, t, h), row(y, t, h)};
          gru_backward(w, layer.activation, cache, dh, g, dx_row(t), dh_prev, scratch);
          dh_next.swap(dh_prev);
        }
        break;
      }
    }
    d_out.swap(d_in);
  }
}

}  // namespace hfm::nn
