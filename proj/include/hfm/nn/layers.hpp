#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hfm/nn/activation.hpp"

/// Per-step forward and backward passes for dense, LSTM and GRU layers.
///
/// The core routines write into caller-provided views so that the sequence
/// driver can keep one contiguous tape per layer; the *_step() helpers wrap
/// them with owned storage for single-step use.
namespace hfm::nn {

template <class T>
struct DenseWeights {
  std::span<T> weight;  // out x in
  std::span<T> bias;    // out
  std::size_t in = 0;
  std::size_t out = 0;
};

// -- dense --------------------------------------------------------------------

/// y = act(W x + b). `z` receives the pre-activation.
void dense_forward(const DenseWeights<const double>& p, Activation act,
                   std::span<const double> x, std::span<double> z, std::span<double> y);

/// Accumulates into `grads`; overwrites `dx` (may be empty to skip).
void dense_backward(const DenseWeights<const double>& p, Activation act,
                    std::span<const double> x, std::span<const double> z,
                    std::span<const double> y, std::span<const double> dy,
                    const DenseWeights<double>& grads, std::span<double> dx,
                    std::vector<double>& scratch);

struct DenseCache {
  std::vector<double> x;
  std::vector<double> z;
  std::vector<double> y;
};

/// Throws DimensionMismatch if x does not match the layer fan-in.
DenseCache dense_step(const DenseWeights<const double>& p, Activation act,
                      std::span<const double> x);

// -- recurrent state ----------------------------------------------------------

struct CellState {
  std::vector<double> hidden;
  std::vector<double> cell;  // empty for GRU

  static CellState zeros(std::size_t width, bool with_cell) {
    return {std::vector<double>(width, 0.0),
            with_cell ? std::vector<double>(width, 0.0) : std::vector<double>{}};
  }
};

// -- LSTM ---------------------------------------------------------------------
//
//   f = sig(W_f [h,x] + b_f)   i = sig(W_i [h,x] + b_i)
//   g = act(W_c [h,x] + b_c)   o = sig(W_o [h,x] + b_o)
//   c' = f*c + i*g             h' = o * act(c')

/// Stacked gate weights: rows ordered f, i, c, o, each H x (H+in).
template <class T>
struct LstmWeights {
  std::span<T> weight;  // 4H x (H+in)
  std::span<T> bias;    // 4H
  std::size_t in = 0;
  std::size_t hidden = 0;
};

template <class T>
struct LstmStepView {
  std::span<T> concat;    // H+in: [h_prev, x]
  std::span<T> pre;       // 4H gate pre-activations
  std::span<T> gates;     // 4H: f, i, g, o
  std::span<T> cell;      // H
  std::span<T> cell_act;  // H: act(c)
  std::span<T> hidden;    // H
};

void lstm_forward(const LstmWeights<const double>& p, Activation act,
                  std::span<const double> x, std::span<const double> h_prev,
                  std::span<const double> c_prev, const LstmStepView<double>& out);

/// dh: gradient into h_t (from output and from t+1); dc: gradient into c_t
/// from t+1. Accumulates parameter gradients and overwrites dx, dh_prev,
/// dc_prev.
void lstm_backward(const LstmWeights<const double>& p, Activation act,
                   const LstmStepView<const double>& cache, std::span<const double> c_prev,
                   std::span<const double> dh, std::span<const double> dc,
                   const LstmWeights<double>& grads, std::span<double> dx,
                   std::span<double> dh_prev, std::span<double> dc_prev,
                   std::vector<double>& scratch);

struct LstmCache {
  std::vector<double> concat, pre, gates, cell, cell_act, hidden, c_prev;
  LstmStepView<const double> view() const {
    return {concat, pre, gates, cell, cell_act, hidden};
  }
};

struct LstmStep {
  CellState next;
  LstmCache cache;
};

LstmStep lstm_step(const LstmWeights<const double>& p, Activation act,
                   std::span<const double> x, const CellState& prev);

// -- GRU ----------------------------------------------------------------------
//
//   r = sig(W_r [h,x] + b_r)   z = sig(W_z [h,x] + b_z)
//   g = act(W_h [r*h, x] + b_h)
//   h' = (1 - z) * h + z * g

/// Stacked weights: rows ordered r, z, h, each H x (H+in).
template <class T>
struct GruWeights {
  std::span<T> weight;  // 3H x (H+in)
  std::span<T> bias;    // 3H
  std::size_t in = 0;
  std::size_t hidden = 0;
};

template <class T>
struct GruStepView {
  std::span<T> concat;        // H+in: [h_prev, x]
  std::span<T> pre;           // 3H: r, z, candidate pre-activations
  std::span<T> gates;         // 2H: r, z
  std::span<T> reset_concat;  // H+in: [r*h_prev, x]
  std::span<T> candidate;     // H
  std::span<T> hidden;        // H
};

void gru_forward(const GruWeights<const double>& p, Activation act, std::span<const double> x,
                 std::span<const double> h_prev, const GruStepView<double>& out);

void gru_backward(const GruWeights<const double>& p, Activation act,
                  const GruStepView<const double>& cache, std::span<const double> dh,
                  const GruWeights<double>& grads, std::span<double> dx,
                  std::span<double> dh_prev, std::vector<double>& scratch);

struct GruCache {
  std::vector<double> concat, pre, gates, reset_concat, candidate, hidden;
  GruStepView<const double> view() const {
    return {concat, pre, gates, reset_concat, candidate, hidden};
  }
};

struct GruStep {
  CellState next;
  GruCache cache;
};

GruStep gru_step(const GruWeights<const double>& p, Activation act, std::span<const double> x,
                 const CellState& prev);

}  // namespace hfm::nn
