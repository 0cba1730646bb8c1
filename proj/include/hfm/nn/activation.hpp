#pragma once

#include <span>
#include <string_view>

namespace hfm::nn {

enum class Activation { Sigmoid, Tanh, ReLU, Identity };

/// Exponent arguments are clamped to +-500 so saturation never overflows.
inline constexpr double kExponentClamp = 500.0;

double activate(Activation kind, double z) noexcept;
/// d activate / dz, given the pre-activation z and its output y.
double derivative(Activation kind, double z, double y) noexcept;

void activate(Activation kind, std::span<const double> z, std::span<double> y) noexcept;

double sigmoid(double z) noexcept;

std::string_view to_string(Activation kind) noexcept;
/// "sigmoid" | "tanh" | "relu" | "identity"; throws InvalidConfig.
Activation parse_activation(std::string_view name);

}  // namespace hfm::nn
