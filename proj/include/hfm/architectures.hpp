#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "hfm/config.hpp"
#include "hfm/iso9869.hpp"
#include "hfm/nn/network.hpp"
#include "hfm/series.hpp"

namespace hfm {

/// Builds a network from a name (case-insensitive):
///   mlp3        dense(3, relu) -> dense(1)
///   lstm100     lstm(100) -> dense(1)
///   gru100      gru(100) -> dense(1)
///   lstmgru100  lstm(50) -> gru(50) -> dense(1)
/// The same grammar works for any width (lstm16, gru8, mlpN, lstmgruN with
/// N even), and layers can be chained with '+', e.g. "lstm8+gru8".
/// Throws UnknownArchitecture.
nn::NetworkSpec build(std::string_view name,
                      nn::Activation cell_activation = nn::Activation::ReLU);

/// The four networks compared in the study, in report order.
std::vector<std::string> standard_architectures();

enum class Channel { Internal = 0, External = 1, Flux = 2 };

struct ChannelStats {
  double mean = 0.0;
  double std = 1.0;
  friend bool operator==(const ChannelStats&, const ChannelStats&) = default;
};

/// Per-channel z-score scaling fitted on the training segment only.
class Normalizer {
 public:
  Normalizer() = default;
  Normalizer(ChannelStats internal, ChannelStats external, ChannelStats flux);

  /// Population mean/std of T_i, T_e and q. Throws ConstantChannel when a
  /// channel has zero spread.
  static Normalizer fit(const MeasurementSeries& train);

  const ChannelStats& stats(Channel c) const noexcept { return stats_[static_cast<int>(c)]; }
  double apply(Channel c, double x) const noexcept;
  double invert(Channel c, double z) const noexcept;

  /// Normalized (T_i, T_e) per step.
  nn::Sequence inputs(const MeasurementSeries& series) const;
  /// Normalized q per step.
  std::vector<double> targets(const MeasurementSeries& series) const;

  friend bool operator==(const Normalizer&, const Normalizer&) = default;

 private:
  ChannelStats stats_[3];
};

struct TrainingRun {
  std::string architecture;
  nn::NetworkSpec spec;
  SplitSpec split;
  std::uint64_t seed = 0;
  TrainConfig config;
  Normalizer normalizer;
  std::vector<double> epoch_losses;  // loss before each update
  std::size_t best_epoch = 0;
  bool converged = false;  // stopped by the patience rule, not max_epochs
  nn::ParamSet params;     // parameters that produced the lowest loss
};

/// Fits on the first floor(f*N) samples of `series`. Full-batch training of
/// the MSE over normalized q; stops at max_epochs or when the best loss has
/// improved by less than min_improvement over the last `patience` epochs.
/// Throws ConstantChannel, DivergedLoss, SplitTooSmall.
TrainingRun train(const nn::NetworkSpec& spec, std::string architecture,
                  const MeasurementSeries& series, SplitSpec split, std::uint64_t seed,
                  const TrainConfig& config);

TrainingRun train(std::string_view architecture, const MeasurementSeries& series,
                  SplitSpec split, std::uint64_t seed, const TrainConfig& config);

/// Heat flux in W/m² for every sample. The network runs from t = 0 over the
/// whole series; the measured flux is never read.
std::vector<double> predict(const TrainingRun& run, const MeasurementSeries& series);

struct PredictedU {
  iso9869::UValueEstimate validation;
  iso9869::UValueEstimate full;
};

/// Average-method U with predicted q and measured temperatures, over the
/// validation segment and over the whole series.
PredictedU predicted_u_value(const TrainingRun& run, const MeasurementSeries& series,
                             SplitSpec split);
PredictedU predicted_u_value(std::span<const double> predicted_flux,
                             const MeasurementSeries& series, SplitSpec split);

// -- checkpoints ----------------------------------------------------------------
//
// JSON document:
//   { "format": "hfm-training-run", "version": 1,
//     "architecture": str, "network": {input_width, layers:[{kind,width,activation}]},
//     "split": "a/b", "seed": uint, "config": {...},
//     "normalizer": {internal|external|flux: {mean, std}},
//     "epoch_losses": [..], "best_epoch": n, "converged": bool,
//     "params": { "layout": [{layer, name, offset, rows, cols}], "values": [..] } }
// Doubles are written as shortest round-trip decimals, so values reload
// bit-exactly.

nlohmann::json to_json(const nn::NetworkSpec& spec);
nn::NetworkSpec network_from_json(const nlohmann::json& j);
nlohmann::json to_json(const nn::ParamSet& params);
nn::ParamSet params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TrainingRun& run);
TrainingRun run_from_json(const nlohmann::json& j);

void save_run(const TrainingRun& run, const std::filesystem::path& path);
TrainingRun load_run(const std::filesystem::path& path);

}  // namespace hfm
