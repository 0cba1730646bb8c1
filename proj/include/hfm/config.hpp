#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include "json.hpp"

#include "hfm/nn/activation.hpp"
#include "hfm/nn/optimizer.hpp"

namespace hfm {

/// Training and evaluation settings. Loaded from a JSON object whose keys
/// are the field names below; absent keys keep their defaults and unknown
/// keys are rejected.
///
///   optimizer            "adam" | "sgd"
///   learning_rate, beta1, beta2, epsilon
///   max_epochs           hard epoch cap
///   patience             window (epochs) for the convergence test
///   min_improvement      required drop of the best training loss over
///                        `patience` epochs, in normalized units
///   cell_activation      recurrent candidate/output activation
///   extrapolation_margin allowance outside the training range, in
///                        normalized (z-score) units
///   workers              concurrent grid cells, 0 = hardware threads
///   kernels              "auto" | "scalar" | "avx2"
struct TrainConfig {
  nn::OptimizerConfig optimizer;
  std::size_t max_epochs = 5000;
  std::size_t patience = 100;
  double min_improvement = 1e-6;
  nn::Activation cell_activation = nn::Activation::ReLU;
  double extrapolation_margin = 0.0;
  std::size_t workers = 1;
  std::string kernels = "auto";

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

nlohmann::json to_json(const TrainConfig& config);
TrainConfig config_from_json(const nlohmann::json& j);
TrainConfig load_config(const std::filesystem::path& path);

/// Reads a JSON document; IoError if unreadable, FormatError if malformed.
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace hfm
