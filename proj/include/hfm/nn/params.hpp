#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hfm/nn/network_spec.hpp"

namespace hfm::nn {

class Rng;

/// One named tensor inside the flat parameter array, row-major.
struct TensorSlot {
  std::size_t layer = 0;
  std::string name;
  std::size_t offset = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t size() const noexcept { return rows * cols; }
  friend bool operator==(const TensorSlot&, const TensorSlot&) = default;
};

/// Layout table for a network. Slots are disjoint, contiguous, and appear
/// in layer order:
///   Dense: W [out x in], b [out]
///   LSTM:  W_f W_i W_c W_o [H x (H+in)], b_f b_i b_c b_o [H]
///   GRU:   W_r W_z W_h [H x (H+in)], b_r b_z b_h [H]
/// Recurrent matrices act on the concatenation [h_prev, x]; gate matrices of
/// one layer are adjacent so they form a single stacked matrix.
class ParamLayout {
 public:
  ParamLayout() = default;
  explicit ParamLayout(std::vector<TensorSlot> slots);

  static ParamLayout for_network(const NetworkSpec& spec);

  std::span<const TensorSlot> slots() const noexcept { return slots_; }
  std::size_t total() const noexcept { return total_; }
  /// Throws LayoutMismatch when absent.
  const TensorSlot& find(std::size_t layer, std::string_view name) const;

  friend bool operator==(const ParamLayout&, const ParamLayout&) = default;

 private:
  std::vector<TensorSlot> slots_;
  std::size_t total_ = 0;
};

/// Flat array of reals tied to a layout. ParamSet and Gradient share this
/// representation.
class FlatTensor {
 public:
  FlatTensor() = default;
  explicit FlatTensor(std::shared_ptr<const ParamLayout> layout);
  FlatTensor(std::shared_ptr<const ParamLayout> layout, std::vector<double> values);

  const ParamLayout& layout() const noexcept { return *layout_; }
  const std::shared_ptr<const ParamLayout>& shared_layout() const noexcept { return layout_; }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<double> block(std::size_t layer, std::string_view name);
  std::span<const double> block(std::size_t layer, std::string_view name) const;
  /// Contiguous run starting at the named slot and spanning `count` slots
  /// of equal size (e.g. stacked gate matrices).
  std::span<const double> stacked(std::size_t layer, std::string_view first,
                                  std::size_t count) const;
  std::span<double> stacked(std::size_t layer, std::string_view first, std::size_t count);

  bool congruent(const FlatTensor& other) const noexcept;
  void fill(double v) noexcept;

  friend bool operator==(const FlatTensor& a, const FlatTensor& b) {
    return a.layout() == b.layout() && a.values_ == b.values_;
  }

 private:
  std::shared_ptr<const ParamLayout> layout_ = std::make_shared<const ParamLayout>();
  std::vector<double> values_;
};

class ParamSet : public FlatTensor {
 public:
  using FlatTensor::FlatTensor;
};

class Gradient : public FlatTensor {
 public:
  using FlatTensor::FlatTensor;
  static Gradient zeros_like(const FlatTensor& params) {
    return Gradient(params.shared_layout());
  }
};

/// Zero-filled parameters for `spec`.
ParamSet make_params(const NetworkSpec& spec);

/// Uniform Glorot init: every matrix entry ~ U(-a, a) with
/// a = sqrt(6 / (fan_in + fan_out)). For recurrent gate matrices the
/// recurrent columns use fan_in = fan_out = H and the input columns use
/// fan_in = in, fan_out = H. Biases are zero except the LSTM forget gate,
/// which starts at 1. Draw order follows the layout.
ParamSet initialize(const NetworkSpec& spec, Rng& rng);

}  // namespace hfm::nn
