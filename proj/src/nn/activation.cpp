#include "hfm/nn/activation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hfm/error.hpp"

namespace hfm::nn {

double sigmoid(double z) noexcept {
  const double c = std::clamp(z, -kExponentClamp, kExponentClamp);
  return 1.0 / (1.0 + std::exp(-c));
}

double activate(Activation kind, double z) noexcept {
  switch (kind) {
    case Activation::Sigmoid: return sigmoid(z);
    case Activation::Tanh: return std::tanh(std::clamp(z, -kExponentClamp, kExponentClamp));
    case Activation::ReLU: return z > 0.0 ? z : 0.0;
    case Activation::Identity: return z;
  }
  return z;
}

double derivative(Activation kind, double z, double y) noexcept {
  switch (kind) {
    case Activation::Sigmoid: return y * (1.0 - y);
    case Activation::Tanh: return 1.0 - y * y;
    case Activation::ReLU: return z > 0.0 ? 1.0 : 0.0;
    case Activation::Identity: return 1.0;
  }
  return 1.0;
}

void activate(Activation kind, std::span<const double> z, std::span<double> y) noexcept {
  for (std::size_t i = 0; i < z.size(); ++i) y[i] = activate(kind, z[i]);
}

std::string_view to_string(Activation kind) noexcept {
  switch (kind) {
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Tanh: return "tanh";
    case Activation::ReLU: return "relu";
    case Activation::Identity: return "identity";
  }
  return "identity";
}

Activation parse_activation(std::string_view name) {
  if (name == "sigmoid") return Activation::Sigmoid;
  if (name == "tanh") return Activation::Tanh;
  if (name == "relu") return Activation::ReLU;
  if (name == "identity") return Activation::Identity;
  throw Error(ErrorCode::InvalidConfig, "unknown activation '" + std::string(name) + "'");
}

}  // namespace hfm::nn
