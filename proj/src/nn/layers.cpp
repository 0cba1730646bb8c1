#include "hfm/nn/layers.hpp"

#include <algorithm>
#include <string>

#include "hfm/error.hpp"
#include "hfm/simd/kernels.hpp"

namespace hfm::nn {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::DimensionMismatch, what);
}

template <class V>
std::span<const double> cview(const V& v) {
  return std::span<const double>(v.data(), v.size());
}

}  // namespace

// -- dense --------------------------------------------------------------------

void dense_forward(const DenseWeights<const double>& p, Activation act,
                   std::span<const double> x, std::span<double> z, std::span<double> y) {
  const auto& k = simd::active();
  k.gemv(p.weight.data(), p.out, p.in, x.data(), p.bias.data(), z.data());
  activate(act, z.first(p.out), y.first(p.out));
}

void dense_backward(const DenseWeights<const double>& p, Activation act,
                    std::span<const double> x, std::span<const double> z,
                    std::span<const double> y, std::span<const double> dy,
                    const DenseWeights<double>& grads, std::span<double> dx,
                    std::vector<double>& scratch) {
  const auto& k = simd::active();
  scratch.resize(p.out);
  double* dz = scratch.data();
  for (std::size_t i = 0; i < p.out; ++i) dz[i] = dy[i] * derivative(act, z[i], y[i]);
  k.ger_acc(grads.weight.data(), p.out, p.in, dz, x.data());
  k.axpy(1.0, dz, grads.bias.data(), p.out);
  if (!dx.empty()) {
    std::fill(dx.begin(), dx.end(), 0.0);
    k.gemv_t_acc(p.weight.data(), p.out, p.in, dz, dx.data());
  }
}

DenseCache dense_step(const DenseWeights<const double>& p, Activation act,
                      std::span<const double> x) {
  require(x.size() == p.in, "dense input width does not match fan-in");
  require(p.weight.size() == p.in * p.out && p.bias.size() == p.out,
          "dense parameter block has the wrong size");
  DenseCache c{std::vector<double>(x.begin(), x.end()), std::vector<double>(p.out),
               std::vector<double>(p.out)};
  dense_forward(p, act, x, c.z, c.y);
  return c;
}

// -- LSTM ---------------------------------------------------------------------

void lstm_forward(const LstmWeights<const double>& p, Activation act,
                  std::span<const double> x, std::span<const double> h_prev,
                  std::span<const double> c_prev, const LstmStepView<double>& out) {
  const std::size_t h = p.hidden;
  const std::size_t cols = h + p.in;
  std::copy(h_prev.begin(), h_prev.end(), out.concat.begin());
  std::copy(x.begin(), x.end(), out.concat.begin() + static_cast<std::ptrdiff_t>(h));
  simd::active().gemv(p.weight.data(), 4 * h, cols, out.concat.data(), p.bias.data(),
                      out.pre.data());
  for (std::size_t k = 0; k < h; ++k) {
    const double f = sigmoid(out.pre[k]);
    const double i = sigmoid(out.pre[h + k]);
    const double g = activate(act, out.pre[2 * h + k]);
    const double o = sigmoid(out.pre[3 * h + k]);
    out.gates[k] = f;
    out.gates[h + k] = i;
    out.gates[2 * h + k] = g;
    out.gates[3 * h + k] = o;
    const double c = f * c_prev[k] + i * g;
    out.cell[k] = c;
    out.cell_act[k] = activate(act, c);
    out.hidden[k] = o * out.cell_act[k];
  }
}

void lstm_backward(const LstmWeights<const double>& p, Activation act,
                   const LstmStepView<const double>& cache, std::span<const double> c_prev,
                   std::span<const double> dh, std::span<const double> dc,
                   const LstmWeights<double>& grads, std::span<double> dx,
                   std::span<double> dh_prev, std::span<double> dc_prev,
                   std::vector<double>& scratch) {
  const std::size_t h = p.hidden;
  const std::size_t cols = h + p.in;
  scratch.assign(4 * h + cols, 0.0);
  double* da = scratch.data();
  double* dv = scratch.data() + 4 * h;
  for (std::size_t k = 0; k < h; ++k) {
    const double f = cache.gates[k];
    const double i = cache.gates[h + k];
    const double g = cache.gates[2 * h + k];
    const double o = cache.gates[3 * h + k];
    const double m = cache.cell_act[k];
    const double dc_total = dc[k] + dh[k] * o * derivative(act, cache.cell[k], m);
    da[k] = dc_total * c_prev[k] * f * (1.0 - f);
    da[h + k] = dc_total * g * i * (1.0 - i);
    da[2 * h + k] = dc_total * i * derivative(act, cache.pre[2 * h + k], g);
    da[3 * h + k] = dh[k] * m * o * (1.0 - o);
    dc_prev[k] = dc_total * f;
  }
  const auto& kern = simd::active();
  kern.ger_acc(grads.weight.data(), 4 * h, cols, da, cache.concat.data());
  kern.axpy(1.0, da, grads.bias.data(), 4 * h);
  kern.gemv_t_acc(p.weight.data(), 4 * h, cols, da, dv);
  std::copy(dv, dv + h, dh_prev.begin());
  if (!dx.empty()) std::copy(dv + h, dv + cols, dx.begin());
}

LstmStep lstm_step(const LstmWeights<const double>& p, Activation act,
                   std::span<const double> x, const CellState& prev) {
  const std::size_t h = p.hidden;
  require(x.size() == p.in, "lstm input width does not match fan-in");
  require(prev.hidden.size() == h && prev.cell.size() == h,
          "lstm state width does not match layer");
  require(p.weight.size() == 4 * h * (h + p.in) && p.bias.size() == 4 * h,
          "lstm parameter block has the wrong size");
  LstmStep s;
  auto& c = s.cache;
  c.concat.resize(h + p.in);
  c.pre.resize(4 * h);
  c.gates.resize(4 * h);
  c.cell.resize(h);
  c.cell_act.resize(h);
  c.hidden.resize(h);
  c.c_prev = prev.cell;
  lstm_forward(p, act, x, prev.hidden, prev.cell,
               {c.concat, c.pre, c.gates, c.cell, c.cell_act, c.hidden});
  s.next.hidden = c.hidden;
  s.next.cell = c.cell;
  return s;
}

// -- GRU ----------------------------------------------------------------------

void gru_forward(const GruWeights<const double>& p, Activation act, std::span<const double> x,
                 std::span<const double> h_prev, const GruStepView<double>& out) {
  const std::size_t h = p.hidden;
  const std::size_t cols = h + p.in;
  const auto& kern = simd::active();
  std::copy(h_prev.begin(), h_prev.end(), out.concat.begin());
  std::copy(x.begin(), x.end(), out.concat.begin() + static_cast<std::ptrdiff_t>(h));
  kern.gemv(p.weight.data(), 2 * h, cols, out.concat.data(), p.bias.data(), out.pre.data());
  for (std::size_t k = 0; k < h; ++k) {
    const double r = sigmoid(out.pre[k]);
    out.gates[k] = r;
    out.gates[h + k] = sigmoid(out.pre[h + k]);
    out.reset_concat[k] = r * h_prev[k];
  }
  std::copy(x.begin(), x.end(), out.reset_concat.begin() + static_cast<std::ptrdiff_t>(h));
  kern.gemv(p.weight.data() + 2 * h * cols, h, cols, out.reset_concat.data(),
            p.bias.data() + 2 * h, out.pre.data() + 2 * h);
  for (std::size_t k = 0; k < h; ++k) {
    const double g = activate(act, out.pre[2 * h + k]);
    const double z = out.gates[h + k];
    out.candidate[k] = g;
    out.hidden[k] = (1.0 - z) * h_prev[k] + z * g;
  }
}

void gru_backward(const GruWeights<const double>& p, Activation act,
                  const GruStepView<const double>& cache, std::span<const double> dh,
                  const GruWeights<double>& grads, std::span<double> dx,
                  std::span<double> dh_prev, std::vector<double>& scratch) {
  const std::size_t h = p.hidden;
  const std::size_t cols = h + p.in;
  scratch.assign(3 * h + 2 * cols, 0.0);
  double* da = scratch.data();          // r, z, candidate
  double* du = da + 3 * h;              // d [r*h_prev, x]
  double* dv = du + cols;               // d [h_prev, x]
  for (std::size_t k = 0; k < h; ++k) {
    const double z = cache.gates[h + k];
    const double g = cache.candidate[k];
    const double hp = cache.concat[k];
    da[2 * h + k] = dh[k] * z * derivative(act, cache.pre[2 * h + k], g);
    da[h + k] = dh[k] * (g - hp) * z * (1.0 - z);
    dh_prev[k] = dh[k] * (1.0 - z);
  }
  const auto& kern = simd::active();
  const double* w_cand = p.weight.data() + 2 * h * cols;
  kern.ger_acc(grads.weight.data() + 2 * h * cols, h, cols, da + 2 * h,
               cache.reset_concat.data());
  kern.axpy(1.0, da + 2 * h, grads.bias.data() + 2 * h, h);
  kern.gemv_t_acc(w_cand, h, cols, da + 2 * h, du);
  for (std::size_t k = 0; k < h; ++k) {
    const double r = cache.gates[k];
    da[k] = du[k] * cache.concat[k] * r * (1.0 - r);
    dh_prev[k] += du[k] * r;
  }
  kern.ger_acc(grads.weight.data(), 2 * h, cols, da, cache.concat.data());
  kern.axpy(1.0, da, grads.bias.data(), 2 * h);
  kern.gemv_t_acc(p.weight.data(), 2 * h, cols, da, dv);
  for (std::size_t k = 0; k < h; ++k) dh_prev[k] += dv[k];
  if (!dx.empty())
    for (std::size_t j = 0; j < p.in; ++j) dx[j] = du[h + j] + dv[h + j];
}

GruStep gru_step(const GruWeights<const double>& p, Activation act, std::span<const double> x,
                 const CellState& prev) {
  const std::size_t h = p.hidden;
  require(x.size() == p.in, "gru input width does not match fan-in");
  require(prev.hidden.size() == h, "gru state width does not match layer");
  require(p.weight.size() == 3 * h * (h + p.in) && p.bias.size() == 3 * h,
          "gru parameter block has the wrong size");
  GruStep s;
  auto& c = s.cache;
  c.concat.resize(h + p.in);
  c.pre.resize(3 * h);
  c.gates.resize(2 * h);
  c.reset_concat.resize(h + p.in);
  c.candidate.resize(h);
  c.hidden.resize(h);
  gru_forward(p, act, x, prev.hidden, {c.concat, c.pre, c.gates, c.reset_concat, c.candidate, c.hidden});
  s.next.hidden = c.hidden;
  return s;
}

}  // namespace hfm::nn
