#include "hfm/nn/params.hpp"

#include <cmath>

#include "hfm/error.hpp"
#include "hfm/nn/rng.hpp"

namespace hfm::nn {

ParamLayout::ParamLayout(std::vector<TensorSlot> slots) : slots_(std::move(slots)) {
  for (const auto& s : slots_) {
    if (s.offset != total_)
      throw Error(ErrorCode::LayoutMismatch, "slot '" + s.name + "' is not contiguous");
    total_ += s.size();
  }
}

ParamLayout ParamLayout::for_network(const NetworkSpec& spec) {
  validate(spec);
  std::vector<TensorSlot> slots;
  std::size_t offset = 0;
  auto add = [&](std::size_t layer, std::string name, std::size_t rows, std::size_t cols) {
    slots.push_back({layer, std::move(name), offset, rows, cols});
    offset += rows * cols;
  };
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const auto& l = spec.layers[i];
    const std::size_t in = spec.fan_in(i);
    const std::size_t h = l.width;
    switch (l.kind) {
      case LayerKind::Dense:
        add(i, "W", h, in);
        add(i, "b", h, 1);
        break;
      case LayerKind::LSTM:
        for (const char* g : {"W_f", "W_i", "W_c", "W_o"}) add(i, g, h, h + in);
        for (const char* g : {"b_f", "b_i", "b_c", "b_o"}) add(i, g, h, 1);
        break;
      case LayerKind::GRU:
        for (const char* g : {"W_r", "W_z", "W_h"}) add(i, g, h, h + in);
        for (const char* g : {"b_r", "b_z", "b_h"}) add(i, g, h, 1);
        break;
    }
  }
  return ParamLayout(std::move(slots));
}

const TensorSlot& ParamLayout::find(std::size_t layer, std::string_view name) const {
  for (const auto& s : slots_)
    if (s.layer == layer && s.name == name) return s;
  throw Error(ErrorCode::LayoutMismatch,
              "no tensor '" + std::string(name) + "' in layer " + std::to_string(layer));
}

FlatTensor::FlatTensor(std::shared_ptr<const ParamLayout> layout)
    : layout_(std::move(layout)), values_(layout_->total(), 0.0) {}

FlatTensor::FlatTensor(std::shared_ptr<const ParamLayout> layout, std::vector<double> values)
    : layout_(std::move(layout)), values_(std::move(values)) {
  if (values_.size() != layout_->total())
    throw Error(ErrorCode::LayoutMismatch,
                "layout expects " + std::to_string(layout_->total()) + " values, got " +
                    std::to_string(values_.size()));
}

std::span<double> FlatTensor::block(std::size_t layer, std::string_view name) {
  const auto& s = layout_->find(layer, name);
  return std::span<double>(values_).subspan(s.offset, s.size());
}

std::span<const double> FlatTensor::block(std::size_t layer, std::string_view name) const {
  const auto& s = layout_->find(layer, name);
  return std::span<const double>(values_).subspan(s.offset, s.size());
}

std::span<const double> FlatTensor::stacked(std::size_t layer, std::string_view first,
                                            std::size_t count) const {
  const auto& s = layout_->find(layer, first);
  return std::span<const double>(values_).subspan(s.offset, s.size() * count);
}

std::span<double> FlatTensor::stacked(std::size_t layer, std::string_view first,
                                      std::size_t count) {
  const auto& s = layout_->find(layer, first);
  return std::span<double>(values_).subspan(s.offset, s.size() * count);
}

bool FlatTensor::congruent(const FlatTensor& other) const noexcept {
  return values_.size() == other.values_.size() &&
         (layout_ == other.layout_ || *layout_ == *other.layout_);
}

void FlatTensor::fill(double v) noexcept { std::fill(values_.begin(), values_.end(), v); }

ParamSet make_params(const NetworkSpec& spec) {
  return ParamSet(std::make_shared<const ParamLayout>(ParamLayout::for_network(spec)));
}

ParamSet initialize(const NetworkSpec& spec, Rng& rng) {
  ParamSet params = make_params(spec);
  auto values = params.values();
  for (const auto& slot : params.layout().slots()) {
    const LayerSpec& layer = spec.layers[slot.layer];
    const std::size_t in = spec.fan_in(slot.layer);
    auto data = values.subspan(slot.offset, slot.size());
    if (slot.name.front() == 'b') {
      std::fill(data.begin(), data.end(), slot.name == "b_f" ? 1.0 : 0.0);
      continue;
    }
    if (layer.kind == LayerKind::Dense) {
      const double a = std::sqrt(6.0 / double(in + layer.width));
      for (double& w : data) w = rng.uniform(-a, a);
      continue;
    }
    const std::size_t h = layer.width;
    const double a_rec = std::sqrt(6.0 / double(h + h));
    const double a_in = std::sqrt(6.0 / double(in + h));
    for (std::size_t r = 0; r < slot.rows; ++r)
      for (std::size_t c = 0; c < slot.cols; ++c) {
        const double a = c < h ? a_rec : a_in;
        data[r * slot.cols + c] = rng.uniform(-a, a);
      }
  }
  return params;
}

}  // namespace hfm::nn
