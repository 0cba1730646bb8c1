#include "hfm/nn/network_spec.hpp"

#include <string>

#include "hfm/error.hpp"

namespace hfm::nn {

std::string_view to_string(LayerKind kind) noexcept {
  switch (kind) {
    case LayerKind::Dense: return "dense";
    case LayerKind::LSTM: return "lstm";
    case LayerKind::GRU: return "gru";
  }
  return "dense";
}

bool NetworkSpec::recurrent() const noexcept {
  for (const auto& l : layers)
    if (l.kind != LayerKind::Dense) return true;
  return false;
}

std::size_t NetworkSpec::fan_in(std::size_t i) const {
  return i == 0 ? input_width : layers.at(i - 1).width;
}

std::string NetworkSpec::describe() const {
  std::string out = std::to_string(input_width);
  for (const auto& l : layers) {
    out += " -> ";
    out += to_string(l.kind);
    out += "(" + std::to_string(l.width) + ", " + std::string(to_string(l.activation)) + ")";
  }
  return out;
}

void validate(const NetworkSpec& spec) {
  if (spec.input_width == 0) throw Error(ErrorCode::InvalidNetwork, "input width is zero");
  if (spec.layers.empty()) throw Error(ErrorCode::InvalidNetwork, "no layers");
  for (std::size_t i = 0; i < spec.layers.size(); ++i)
    if (spec.layers[i].width == 0)
      throw Error(ErrorCode::InvalidNetwork, "layer " + std::to_string(i) + " has width 0");
  const LayerSpec& out = spec.layers.back();
  if (out.kind != LayerKind::Dense || out.width != 1 || out.activation != Activation::Identity)
    throw Error(ErrorCode::InvalidNetwork, "output layer must be dense(1, identity)");
}

std::size_t parameter_count(const NetworkSpec& spec) {
  validate(spec);
  std::size_t total = 0;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const auto& l = spec.layers[i];
    const std::size_t in = spec.fan_in(i);
    switch (l.kind) {
      case LayerKind::Dense: total += l.width * in + l.width; break;
      case LayerKind::LSTM: total += 4 * (l.width * (l.width + in) + l.width); break;
      case LayerKind::GRU: total += 3 * (l.width * (l.width + in) + l.width); break;
    }
  }
  return total;
}

}  // namespace hfm::nn
