#include "hfm/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "hfm/error.hpp"

namespace hfm {

nlohmann::json to_json(const TrainConfig& c) {
  nlohmann::json j;
  j["optimizer"] = std::string(nn::to_string(c.optimizer.kind));
  j["learning_rate"] = c.optimizer.learning_rate;
  j["beta1"] = c.optimizer.beta1;
  j["beta2"] = c.optimizer.beta2;
  j["epsilon"] = c.optimizer.epsilon;
  j["max_epochs"] = c.max_epochs;
  j["patience"] = c.patience;
  j["min_improvement"] = c.min_improvement;
  j["cell_activation"] = std::string(nn::to_string(c.cell_activation));
  if (std::isinf(c.extrapolation_margin))
    j["extrapolation_margin"] = "inf";
  else
    j["extrapolation_margin"] = c.extrapolation_margin;
  j["workers"] = c.workers;
  j["kernels"] = c.kernels;
  return j;
}

namespace {

double positive(const nlohmann::json& v, const char* key) {
  const double x = v.get<double>();
  if (!(x > 0.0) || !std::isfinite(x))
    throw Error(ErrorCode::InvalidConfig, std::string(key) + " must be a positive number");
  return x;
}

}  // namespace

TrainConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  TrainConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "optimizer")
        c.optimizer.kind = nn::parse_optimizer(v.get<std::string>());
      else if (key == "learning_rate")
        c.optimizer.learning_rate = positive(v, "learning_rate");
      else if (key == "beta1")
        c.optimizer.beta1 = v.get<double>();
      else if (key == "beta2")
        c.optimizer.beta2 = v.get<double>();
      else if (key == "epsilon")
        c.optimizer.epsilon = positive(v, "epsilon");
      else if (key == "max_epochs")
        c.max_epochs = v.get<std::size_t>();
      else if (key == "patience")
        c.patience = v.get<std::size_t>();
      else if (key == "min_improvement")
        c.min_improvement = v.get<double>();
      else if (key == "cell_activation")
        c.cell_activation = nn::parse_activation(v.get<std::string>());
      else if (key == "extrapolation_margin")
        c.extrapolation_margin = v.is_string() && v.get<std::string>() == "inf"
                                     ? std::numeric_limits<double>::infinity()
                                     : v.get<double>();
      else if (key == "workers")
        c.workers = v.get<std::size_t>();
      else if (key == "kernels")
        c.kernels = v.get<std::string>();
      else
        throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  if (!(c.optimizer.beta1 >= 0.0 && c.optimizer.beta1 < 1.0 && c.optimizer.beta2 >= 0.0 &&
        c.optimizer.beta2 < 1.0))
    throw Error(ErrorCode::InvalidConfig, "beta1 and beta2 must lie in [0, 1)");
  if (c.max_epochs == 0) throw Error(ErrorCode::InvalidConfig, "max_epochs must be positive");
  if (c.extrapolation_margin < 0.0)
    throw Error(ErrorCode::InvalidConfig, "extrapolation_margin must be non-negative");
  if (c.kernels != "auto" && c.kernels != "scalar" && c.kernels != "avx2")
    throw Error(ErrorCode::InvalidConfig, "kernels must be auto, scalar or avx2");
  return c;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::FormatError, path.string() + ": " + e.what());
  }
}

TrainConfig load_config(const std::filesystem::path& path) {
  return config_from_json(read_json_file(path));
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace hfm
