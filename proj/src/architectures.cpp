#include "hfm/architectures.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "hfm/error.hpp"
#include "hfm/nn/loss.hpp"
#include "hfm/nn/optimizer.hpp"
#include "hfm/nn/rng.hpp"
#include "hfm/simd/kernels.hpp"

namespace hfm {

// -- build ------------------------------------------------------------------------

namespace {

[[noreturn]] void unknown(std::string_view name) {
  throw Error(ErrorCode::UnknownArchitecture, "unknown architecture '" + std::string(name) + "'");
}

bool take_width(std::string_view digits, std::size_t& out) {
  if (digits.empty()) return false;
  const auto* end = digits.data() + digits.size();
  auto [ptr, ec] = std::from_chars(digits.data(), end, out);
  return ec == std::errc{} && ptr == end && out > 0;
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

}  // namespace

nn::NetworkSpec build(std::string_view name, nn::Activation cell_activation) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  nn::NetworkSpec spec;
  spec.input_width = 2;
  std::string_view rest = lower;
  if (rest.empty()) unknown(name);
  while (!rest.empty()) {
    const auto plus = rest.find('+');
    const std::string_view token = rest.substr(0, plus);
    rest = plus == std::string_view::npos ? std::string_view{} : rest.substr(plus + 1);
    if (plus != std::string_view::npos && rest.empty()) unknown(name);
    std::size_t width = 0;
    if (starts_with(token, "lstmgru")) {
      if (!take_width(token.substr(7), width) || width % 2 != 0) unknown(name);
      spec.layers.push_back({nn::LayerKind::LSTM, width / 2, cell_activation});
      spec.layers.push_back({nn::LayerKind::GRU, width / 2, cell_activation});
    } else if (starts_with(token, "lstm")) {
      if (!take_width(token.substr(4), width)) unknown(name);
      spec.layers.push_back({nn::LayerKind::LSTM, width, cell_activation});
    } else if (starts_with(token, "gru")) {
      if (!take_width(token.substr(3), width)) unknown(name);
      spec.layers.push_back({nn::LayerKind::GRU, width, cell_activation});
    } else if (starts_with(token, "mlp")) {
      if (!take_width(token.substr(3), width)) unknown(name);
      spec.layers.push_back({nn::LayerKind::Dense, width, nn::Activation::ReLU});
    } else {
      unknown(name);
    }
  }
  spec.layers.push_back({nn::LayerKind::Dense, 1, nn::Activation::Identity});
  nn::validate(spec);
  return spec;
}

std::vector<std::string> standard_architectures() {
  return {"MLP3", "LSTM100", "GRU100", "LSTMGRU100"};
}

// -- Normalizer -----------------------------------------------------------------------

Normalizer::Normalizer(ChannelStats internal, ChannelStats external, ChannelStats flux)
    : stats_{internal, external, flux} {}

namespace {

ChannelStats fit_channel(const std::vector<double>& x, const char* name) {
  double sum = 0.0;
  for (double v : x) sum += v;
  const double mean = sum / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(x.size()));
  if (!(sd > 0.0) || !std::isfinite(sd))
    throw Error(ErrorCode::ConstantChannel,
                std::string(name) + " is constant over the training segment");
  return {mean, sd};
}

}  // namespace

Normalizer Normalizer::fit(const MeasurementSeries& train) {
  return Normalizer(fit_channel(train.internal_temperatures(), "interior temperature"),
                    fit_channel(train.external_temperatures(), "exterior temperature"),
                    fit_channel(train.heat_fluxes(), "heat flux"));
}

double Normalizer::apply(Channel c, double x) const noexcept {
  const auto& s = stats(c);
  return (x - s.mean) / s.std;
}

double Normalizer::invert(Channel c, double z) const noexcept {
  const auto& s = stats(c);
  return z * s.std + s.mean;
}

nn::Sequence Normalizer::inputs(const MeasurementSeries& series) const {
  nn::Sequence seq(series.size(), 2);
  for (std::size_t t = 0; t < series.size(); ++t) {
    seq.values[2 * t] = apply(Channel::Internal, series[t].t_internal);
    seq.values[2 * t + 1] = apply(Channel::External, series[t].t_external);
  }
  return seq;
}

std::vector<double> Normalizer::targets(const MeasurementSeries& series) const {
  std::vector<double> out(series.size());
  for (std::size_t t = 0; t < series.size(); ++t)
    out[t] = apply(Channel::Flux, series[t].heat_flux);
  return out;
}

// -- training -------------------------------------------------------------------------

TrainingRun train(const nn::NetworkSpec& spec, std::string architecture,
                  const MeasurementSeries& series, SplitSpec split, std::uint64_t seed,
                  const TrainConfig& config) {
  simd::select(config.kernels);
  const MeasurementSeries segment = hfm::split(series, split).train;

  TrainingRun run;
  run.architecture = std::move(architecture);
  run.spec = spec;
  run.split = split;
  run.seed = seed;
  run.config = config;
  run.normalizer = Normalizer::fit(segment);

  const nn::Network net(spec);
  const nn::Sequence inputs = run.normalizer.inputs(segment);
  const std::vector<double> targets = run.normalizer.targets(segment);

  nn::Rng rng(seed);
  nn::ParamSet params = nn::initialize(spec, rng);
  nn::Gradient grad = nn::Gradient::zeros_like(params);
  nn::Optimizer optimizer(config.optimizer);

  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_history;
  run.params = params;
  run.epoch_losses.reserve(config.max_epochs);
  best_history.reserve(config.max_epochs);

  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    const double loss = nn::loss_and_gradient(net, params, inputs, targets, grad);
    if (!std::isfinite(loss))
      throw Error(ErrorCode::DivergedLoss,
                  run.architecture + " training loss became non-finite at epoch " +
                      std::to_string(epoch));
    run.epoch_losses.push_back(loss);
    if (loss < best) {
      best = loss;
      run.best_epoch = epoch;
      run.params = params;
    }
    best_history.push_back(best);
    if (config.patience > 0 && epoch >= config.patience &&
        best_history[epoch - config.patience] - best < config.min_improvement) {
      run.converged = true;
      break;
    }
    optimizer.step(params, grad);
  }
  return run;
}

TrainingRun train(std::string_view architecture, const MeasurementSeries& series,
                  SplitSpec split, std::uint64_t seed, const TrainConfig& config) {
  return train(build(architecture, config.cell_activation), std::string(architecture), series,
               split, seed, config);
}

std::vector<double> predict(const TrainingRun& run, const MeasurementSeries& series) {
  simd::select(run.config.kernels);
  const nn::Network net(run.spec);
  std::vector<double> out = net.forward(run.params, run.normalizer.inputs(series));
  for (double& q : out) q = run.normalizer.invert(Channel::Flux, q);
  return out;
}

PredictedU predicted_u_value(std::span<const double> predicted_flux,
                             const MeasurementSeries& series, SplitSpec split) {
  if (predicted_flux.size() != series.size())
    throw Error(ErrorCode::LengthMismatch, "prediction length does not match the series");
  const std::size_t n_train = hfm::split(series, split).train.size();
  std::vector<double> dt(series.size());
  for (std::size_t t = 0; t < series.size(); ++t) dt[t] = series[t].delta_t();
  PredictedU out;
  out.validation = iso9869::average_u_value(predicted_flux.subspan(n_train),
                                            std::span<const double>(dt).subspan(n_train));
  out.full = iso9869::average_u_value(predicted_flux, dt);
  return out;
}

PredictedU predicted_u_value(const TrainingRun& run, const MeasurementSeries& series,
                             SplitSpec split) {
  return predicted_u_value(predict(run, series), series, split);
}

// -- checkpoints --------------------------------------------------------------------

namespace {

constexpr const char* kRunFormat = "hfm-training-run";
constexpr int kRunVersion = 1;

nn::LayerKind parse_kind(const std::string& s) {
  if (s == "dense") return nn::LayerKind::Dense;
  if (s == "lstm") return nn::LayerKind::LSTM;
  if (s == "gru") return nn::LayerKind::GRU;
  throw Error(ErrorCode::FormatError, "unknown layer kind '" + s + "'");
}

}  // namespace

nlohmann::json to_json(const nn::NetworkSpec& spec) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : spec.layers)
    layers.push_back({{"kind", std::string(nn::to_string(l.kind))},
                      {"width", l.width},
                      {"activation", std::string(nn::to_string(l.activation))}});
  return {{"input_width", spec.input_width}, {"layers", layers}};
}

nn::NetworkSpec network_from_json(const nlohmann::json& j) {
  nn::NetworkSpec spec;
  spec.input_width = j.at("input_width").get<std::size_t>();
  for (const auto& l : j.at("layers"))
    spec.layers.push_back({parse_kind(l.at("kind").get<std::string>()),
                           l.at("width").get<std::size_t>(),
                           nn::parse_activation(l.at("activation").get<std::string>())});
  nn::validate(spec);
  return spec;
}

nlohmann::json to_json(const nn::ParamSet& params) {
  nlohmann::json layout = nlohmann::json::array();
  for (const auto& s : params.layout().slots())
    layout.push_back({{"layer", s.layer},
                      {"name", s.name},
                      {"offset", s.offset},
                      {"rows", s.rows},
                      {"cols", s.cols}});
  const auto v = params.values();
  return {{"layout", layout}, {"values", std::vector<double>(v.begin(), v.end())}};
}

nn::ParamSet params_from_json(const nlohmann::json& j) {
  std::vector<nn::TensorSlot> slots;
  for (const auto& s : j.at("layout"))
    slots.push_back({s.at("layer").get<std::size_t>(), s.at("name").get<std::string>(),
                     s.at("offset").get<std::size_t>(), s.at("rows").get<std::size_t>(),
                     s.at("cols").get<std::size_t>()});
  return nn::ParamSet(std::make_shared<const nn::ParamLayout>(std::move(slots)),
                      j.at("values").get<std::vector<double>>());
}

nlohmann::json to_json(const TrainingRun& run) {
  auto stats = [](const ChannelStats& s) { return nlohmann::json{{"mean", s.mean}, {"std", s.std}}; };
  return {{"format", kRunFormat},
          {"version", kRunVersion},
          {"architecture", run.architecture},
          {"network", to_json(run.spec)},
          {"split", run.split.label()},
          {"seed", run.seed},
          {"config", to_json(run.config)},
          {"normalizer",
           {{"internal", stats(run.normalizer.stats(Channel::Internal))},
            {"external", stats(run.normalizer.stats(Channel::External))},
            {"flux", stats(run.normalizer.stats(Channel::Flux))}}},
          {"epoch_losses", run.epoch_losses},
          {"best_epoch", run.best_epoch},
          {"converged", run.converged},
          {"params", to_json(run.params)}};
}

TrainingRun run_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kRunFormat)
      throw Error(ErrorCode::FormatError, "not a training-run checkpoint");
    if (j.at("version").get<int>() != kRunVersion)
      throw Error(ErrorCode::FormatError,
                  "unsupported checkpoint version " + j.at("version").dump());
    auto stats = [](const nlohmann::json& s) {
      return ChannelStats{s.at("mean").get<double>(), s.at("std").get<double>()};
    };
    TrainingRun run;
    run.architecture = j.at("architecture").get<std::string>();
    run.spec = network_from_json(j.at("network"));
    run.split = SplitSpec::parse(j.at("split").get<std::string>());
    run.seed = j.at("seed").get<std::uint64_t>();
    run.config = config_from_json(j.at("config"));
    const auto& n = j.at("normalizer");
    run.normalizer = Normalizer(stats(n.at("internal")), stats(n.at("external")),
                                stats(n.at("flux")));
    run.epoch_losses = j.at("epoch_losses").get<std::vector<double>>();
    run.best_epoch = j.at("best_epoch").get<std::size_t>();
    run.converged = j.at("converged").get<bool>();
    run.params = params_from_json(j.at("params"));
    if (!(run.params.layout() == nn::ParamLayout::for_network(run.spec)))
      throw Error(ErrorCode::LayoutMismatch, "checkpoint layout does not match its network");
    return run;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("malformed checkpoint: ") + e.what());
  }
}

void save_run(const TrainingRun& run, const std::filesystem::path& path) {
  write_text_file(path, to_json(run).dump(1) + "\n");
}

TrainingRun load_run(const std::filesystem::path& path) {
  return run_from_json(read_json_file(path));
}

}  // namespace hfm
