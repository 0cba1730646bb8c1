#include "hfm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hfm/config.hpp"
#include "hfm/error.hpp"
#include "hfm/nn/rng.hpp"

namespace hfm::synth {

void validate(const WallSpec& wall) {
  if (wall.layers.empty()) throw Error(ErrorCode::InvalidWall, "wall has no layers");
  if (!(wall.r_si > 0.0) || !(wall.r_se > 0.0) || !std::isfinite(wall.r_si) ||
      !std::isfinite(wall.r_se))
    throw Error(ErrorCode::InvalidWall, "surface resistances must be positive");
  for (std::size_t i = 0; i < wall.layers.size(); ++i) {
    const auto& l = wall.layers[i];
    if (!(l.resistance > 0.0) || !std::isfinite(l.resistance))
      throw Error(ErrorCode::InvalidWall, "layer " + std::to_string(i) + " resistance must be positive");
    if (!(l.capacitance >= 0.0) || !std::isfinite(l.capacitance))
      throw Error(ErrorCode::InvalidWall,
                  "layer " + std::to_string(i) + " capacitance must be non-negative");
  }
}

double true_u(const WallSpec& wall) {
  validate(wall);
  double r = wall.r_si + wall.r_se;
  for (const auto& l : wall.layers) r += l.resistance;
  return 1.0 / r;
}

// -- scenario -----------------------------------------------------------------------

std::size_t BoundaryScenario::sample_count() const {
  const double total = duration_hours * 3600.0;
  return static_cast<std::size_t>(std::floor(total / static_cast<double>(step.count()) + 1e-9)) + 1;
}

namespace {

double sinusoid(double amplitude, double period_hours, double phase_hours, double seconds) {
  if (amplitude == 0.0) return 0.0;
  const double period = period_hours * 3600.0;
  // Reduce before scaling so whole periods map to identical arguments.
  const double phase = std::fmod(seconds + phase_hours * 3600.0, period);
  return amplitude * std::sin(2.0 * std::numbers::pi * (phase / period));
}

}  // namespace

double BoundaryScenario::interior_at(double seconds) const {
  return interior_mean +
         sinusoid(interior_amplitude, interior_period_hours, interior_phase_hours, seconds);
}

double BoundaryScenario::exterior_at(double seconds) const {
  double value = exterior_mean +
                 sinusoid(exterior_amplitude, exterior_period_hours, exterior_phase_hours, seconds);
  if (exterior_step && seconds >= exterior_step->time_hours * 3600.0)
    value += exterior_step->magnitude;
  return value;
}

void validate(const BoundaryScenario& s) {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidScenario, what); };
  if (!(s.duration_hours > 0.0) || !std::isfinite(s.duration_hours)) bad("duration must be positive");
  if (s.step.count() <= 0) bad("step must be positive");
  if (s.sample_count() < 2) bad("duration shorter than one step");
  if (!(s.interior_noise >= 0.0) || !(s.exterior_noise >= 0.0) || !(s.flux_noise >= 0.0))
    bad("noise sigma must be non-negative");
  if (s.exterior_amplitude != 0.0 && !(s.exterior_period_hours > 0.0))
    bad("exterior period must be positive");
  if (s.interior_amplitude != 0.0 && !(s.interior_period_hours > 0.0))
    bad("interior period must be positive");
  for (double v : {s.interior_mean, s.interior_amplitude, s.interior_phase_hours, s.exterior_mean, s.exterior_amplitude, s.exterior_phase_hours,
                   s.initial_temperature})
    if (!std::isfinite(v)) bad("non-finite scenario value");
}

// -- RC model -----------------------------------------------------------------------

RcWallModel::RcWallModel(const WallSpec& wall) {
  validate(wall);
  const std::size_t n = wall.layers.size();
  resistance_.push_back(wall.r_si);
  for (const auto& l : wall.layers) resistance_.push_back(l.resistance);
  resistance_.push_back(wall.r_se);
  capacitance_.assign(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    capacitance_[k] += 0.5 * wall.layers[k].capacitance;
    capacitance_[k + 1] += 0.5 * wall.layers[k].capacitance;
  }
  temperature_.assign(n + 1, 0.0);
}

double RcWallModel::min_time_constant() const noexcept {
  double tau = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < capacitance_.size(); ++k) {
    if (capacitance_[k] <= 0.0) continue;
    const double conductance = 1.0 / resistance_[k] + 1.0 / resistance_[k + 1];
    tau = std::min(tau, capacitance_[k] / conductance);
  }
  return tau;
}

double RcWallModel::max_substep() const noexcept { return 0.1 * min_time_constant(); }

std::vector<double> RcWallModel::node_temperatures(double t_in, double t_out) const {
  // Points: interior air, nodes 0..n, exterior air. Link j joins point j and j+1.
  const std::size_t nodes = capacitance_.size();
  std::vector<double> point(nodes + 2);
  point.front() = t_in;
  point.back() = t_out;
  std::size_t anchor = 0;
  for (std::size_t p = 1; p < point.size(); ++p) {
    const bool fixed = p == point.size() - 1 || capacitance_[p - 1] > 0.0;
    if (!fixed) continue;
    if (p < point.size() - 1) point[p] = temperature_[p - 1];
    // Linear in cumulative resistance between the two anchors.
    double total = 0.0;
    for (std::size_t j = anchor; j < p; ++j) total += resistance_[j];
    double acc = 0.0;
    for (std::size_t q = anchor + 1; q < p; ++q) {
      acc += resistance_[q - 1];
      point[q] = point[anchor] + (point[p] - point[anchor]) * (acc / total);
    }
    anchor = p;
  }
  return std::vector<double>(point.begin() + 1, point.end() - 1);
}

std::vector<double> RcWallModel::interface_fluxes(double t_in, double t_out) const {
  const auto nodes = node_temperatures(t_in, t_out);
  std::vector<double> flux(resistance_.size());
  for (std::size_t j = 0; j < resistance_.size(); ++j) {
    const double left = j == 0 ? t_in : nodes[j - 1];
    const double right = j == nodes.size() ? t_out : nodes[j];
    flux[j] = (left - right) / resistance_[j];
  }
  return flux;
}

double RcWallModel::interior_flux(double t_in, double t_out) const {
  return (t_in - node_temperatures(t_in, t_out).front()) / resistance_.front();
}

void RcWallModel::set_steady(double t_in, double t_out) {
  double total = 0.0;
  for (double r : resistance_) total += r;
  double acc = 0.0;
  for (std::size_t k = 0; k < temperature_.size(); ++k) {
    acc += resistance_[k];
    temperature_[k] = t_in + (t_out - t_in) * (acc / total);
  }
}

void RcWallModel::set_uniform(double temperature) {
  std::fill(temperature_.begin(), temperature_.end(), temperature);
}

void RcWallModel::euler_step(double dt, double t_in, double t_out) {
  const auto nodes = node_temperatures(t_in, t_out);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (capacitance_[k] <= 0.0) continue;
    const double left = k == 0 ? t_in : nodes[k - 1];
    const double right = k + 1 == nodes.size() ? t_out : nodes[k + 1];
    const double q_in = (left - nodes[k]) / resistance_[k];
    const double q_out = (nodes[k] - right) / resistance_[k + 1];
    temperature_[k] = nodes[k] + dt * (q_in - q_out) / capacitance_[k];
  }
}

// -- simulate -----------------------------------------------------------------------

MeasurementSeries simulate(const WallSpec& wall, const BoundaryScenario& scenario,
                           std::uint64_t seed) {
  validate(scenario);
  RcWallModel model(wall);
  const double step = static_cast<double>(scenario.step.count());
  std::size_t substeps = 1;
  const double max_dt = model.max_substep();
  if (std::isfinite(max_dt)) {
    const double needed = std::ceil(step / max_dt);
    if (!(needed <= static_cast<double>(kMaxSubsteps)))
      throw Error(ErrorCode::UnstableConfiguration,
                  "explicit integration needs " + format_double(needed) +
                      " sub-steps per sample (limit " + std::to_string(kMaxSubsteps) +
                      "); smallest node time constant is " +
                      format_double(model.min_time_constant()) + " s");
    substeps = std::max<std::size_t>(1, static_cast<std::size_t>(needed));
  }
  const double dt = step / static_cast<double>(substeps);

  if (scenario.initial == InitialState::Steady)
    model.set_steady(scenario.interior_at(0.0), scenario.exterior_at(0.0));
  else
    model.set_uniform(scenario.initial_temperature);

  nn::Rng rng(seed);
  const std::size_t n = scenario.sample_count();
  std::vector<Sample> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * step;
    if (i > 0) {
      const double t0 = static_cast<double>(i - 1) * step;
      for (std::size_t s = 0; s < substeps; ++s) {
        const double ts = t0 + static_cast<double>(s) * dt;
        model.euler_step(dt, scenario.interior_at(ts), scenario.exterior_at(ts));
      }
    }
    const double t_in = scenario.interior_at(t);
    const double t_out = scenario.exterior_at(t);
    Sample sample;
    sample.timestamp = scenario.start + std::chrono::seconds(static_cast<std::int64_t>(i) *
                                                             scenario.step.count());
    sample.heat_flux = model.interior_flux(t_in, t_out);
    sample.t_internal = t_in;
    sample.t_external = t_out;
    // Fixed draw order per sample keeps noise streams independent of which
    // sigmas are zero.
    const double n_in = rng.normal();
    const double n_out = rng.normal();
    const double n_q = rng.normal();
    sample.t_internal += scenario.interior_noise * n_in;
    sample.t_external += scenario.exterior_noise * n_out;
    sample.heat_flux += scenario.flux_noise * n_q;
    samples.push_back(sample);
  }
  return MeasurementSeries(std::move(samples), scenario.step);
}

// -- JSON ----------------------------------------------------------------------------

nlohmann::json to_json(const WallSpec& wall) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : wall.layers)
    layers.push_back({{"resistance", l.resistance}, {"capacitance", l.capacitance}});
  return {{"layers", layers}, {"r_si", wall.r_si}, {"r_se", wall.r_se}};
}

WallSpec wall_from_json(const nlohmann::json& j) {
  WallSpec wall;
  try {
    for (const auto& l : j.at("layers"))
      wall.layers.push_back({l.at("resistance").get<double>(), l.value("capacitance", 0.0)});
    wall.r_si = j.value("r_si", wall.r_si);
    wall.r_se = j.value("r_se", wall.r_se);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidWall, e.what());
  }
  validate(wall);
  return wall;
}

nlohmann::json to_json(const BoundaryScenario& s) {
  nlohmann::json exterior = {{"mean", s.exterior_mean},
                             {"amplitude", s.exterior_amplitude},
                             {"period_hours", s.exterior_period_hours},
                             {"phase_hours", s.exterior_phase_hours},
                             {"noise_sigma", s.exterior_noise}};
  if (s.exterior_step)
    exterior["step"] = {{"time_hours", s.exterior_step->time_hours},
                        {"magnitude", s.exterior_step->magnitude}};
  nlohmann::json j = {{"duration_hours", s.duration_hours},
                      {"step_seconds", s.step.count()},
                      {"start", format_timestamp(s.start)},
                      {"interior",
                       {{"mean", s.interior_mean},
                        {"amplitude", s.interior_amplitude},
                        {"period_hours", s.interior_period_hours},
                        {"phase_hours", s.interior_phase_hours},
                        {"noise_sigma", s.interior_noise}}},
                      {"exterior", exterior},
                      {"flux_noise_sigma", s.flux_noise},
                      {"initial", s.initial == InitialState::Steady ? "steady" : "uniform"},
                      {"seed", s.seed}};
  if (s.initial == InitialState::Uniform) j["initial_temperature"] = s.initial_temperature;
  return j;
}

BoundaryScenario scenario_from_json(const nlohmann::json& j) {
  BoundaryScenario s;
  try {
    s.duration_hours = j.at("duration_hours").get<double>();
    s.step = std::chrono::seconds(j.value("step_seconds", std::int64_t{600}));
    if (j.contains("start")) s.start = parse_timestamp(j.at("start").get<std::string>());
    if (j.contains("interior")) {
      const auto& in = j.at("interior");
      s.interior_mean = in.value("mean", s.interior_mean);
      s.interior_amplitude = in.value("amplitude", 0.0);
      s.interior_period_hours = in.value("period_hours", 24.0);
      s.interior_phase_hours = in.value("phase_hours", 0.0);
      s.interior_noise = in.value("noise_sigma", 0.0);
    }
    if (j.contains("exterior")) {
      const auto& ex = j.at("exterior");
      s.exterior_mean = ex.value("mean", s.exterior_mean);
      s.exterior_amplitude = ex.value("amplitude", 0.0);
      s.exterior_period_hours = ex.value("period_hours", 24.0);
      s.exterior_phase_hours = ex.value("phase_hours", 0.0);
      s.exterior_noise = ex.value("noise_sigma", 0.0);
      if (ex.contains("step"))
        s.exterior_step = StepChange{ex.at("step").at("time_hours").get<double>(),
                                     ex.at("step").at("magnitude").get<double>()};
    }
    s.flux_noise = j.value("flux_noise_sigma", 0.0);
    const std::string initial = j.value("initial", std::string("steady"));
    if (initial == "steady")
      s.initial = InitialState::Steady;
    else if (initial == "uniform")
      s.initial = InitialState::Uniform;
    else
      throw Error(ErrorCode::InvalidScenario, "initial must be 'steady' or 'uniform'");
    s.initial_temperature = j.value("initial_temperature", s.initial_temperature);
    s.seed = j.value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidScenario, e.what());
  }
  validate(s);
  return s;
}

WallSpec load_wall(const std::filesystem::path& path) {
  return wall_from_json(read_json_file(path));
}

BoundaryScenario load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(read_json_file(path));
}

}  // namespace hfm::synth
