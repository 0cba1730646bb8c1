#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hfm/nn/layers.hpp"
#include "hfm/nn/network_spec.hpp"
#include "hfm/nn/params.hpp"

namespace hfm::nn {

/// Row-major [steps x width] time series of network inputs or outputs.
struct Sequence {
  std::size_t steps = 0;
  std::size_t width = 0;
  std::vector<double> values;

  Sequence() = default;
  Sequence(std::size_t steps_, std::size_t width_)
      : steps(steps_), width(width_), values(steps_ * width_, 0.0) {}

  std::span<double> row(std::size_t t) { return std::span<double>(values).subspan(t * width, width); }
  std::span<const double> row(std::size_t t) const {
    return std::span<const double>(values).subspan(t * width, width);
  }
};

/// Intermediate values of one forward pass over a sequence, kept for BPTT.
struct Tape {
  struct LayerTape {
    std::vector<double> concat, pre, gates, cell, cell_act, reset_concat, candidate;
  };
  std::size_t steps = 0;
  /// activations[0] is the input; activations[l + 1] is the output of layer l.
  std::vector<std::vector<double>> activations;
  std::vector<LayerTape> layers;
};

/// Runs a NetworkSpec over whole sequences. Recurrent state starts at zero
/// at t = 0 and is carried through every step; there is no truncation.
class Network {
 public:
  explicit Network(NetworkSpec spec);

  const NetworkSpec& spec() const noexcept { return spec_; }

  /// One output per step.
  std::vector<double> forward(const ParamSet& params, const Sequence& inputs) const;
  std::vector<double> forward(const ParamSet& params, const Sequence& inputs, Tape& tape) const;

  /// Accumulates dJ/dW into `grad` given dJ/d(output_t) for every step.
  void backward(const ParamSet& params, const Tape& tape, std::span<const double> d_outputs,
                Gradient& grad) const;

 private:
  NetworkSpec spec_;
};

// Typed views over the parameter blocks of layer `i`.
DenseWeights<const double> dense_weights(const FlatTensor& p, const NetworkSpec& spec, std::size_t i);
DenseWeights<double> dense_weights(FlatTensor& p, const NetworkSpec& spec, std::size_t i);
LstmWeights<const double> lstm_weights(const FlatTensor& p, const NetworkSpec& spec, std::size_t i);
LstmWeights<double> lstm_weights(FlatTensor& p, const NetworkSpec& spec, std::size_t i);
GruWeights<const double> gru_weights(const FlatTensor& p, const NetworkSpec& spec, std::size_t i);
GruWeights<double> gru_weights(FlatTensor& p, const NetworkSpec& spec, std::size_t i);

}  // namespace hfm::nn
