#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "json.hpp"

#include "hfm/series.hpp"

/// Lumped RC wall model used to generate heat-flux-method records with a
/// known U-value.
namespace hfm::synth {

struct WallLayer {
  double resistance = 0.0;   // m²K/W, > 0
  double capacitance = 0.0;  // J/(m²K), >= 0
  friend bool operator==(const WallLayer&, const WallLayer&) = default;
};

struct WallSpec {
  std::vector<WallLayer> layers;
  double r_si = 0.13;  // interior surface resistance, m²K/W
  double r_se = 0.04;  // exterior surface resistance, m²K/W
  friend bool operator==(const WallSpec&, const WallSpec&) = default;
};

/// Throws InvalidWall.
void validate(const WallSpec& wall);

/// 1 / (r_si + sum(R) + r_se)
double true_u(const WallSpec& wall);

struct StepChange {
  double time_hours = 0.0;  // since scenario start
  double magnitude = 0.0;   // K added to the exterior temperature
  friend bool operator==(const StepChange&, const StepChange&) = default;
};

enum class InitialState { Steady, Uniform };

struct BoundaryScenario {
  double duration_hours = 96.0;
  std::chrono::seconds step{600};
  Timestamp start = std::chrono::sys_days{std::chrono::year{2019} / 2 / 22} + std::chrono::hours{14};

  double interior_mean = 20.0;
  double interior_amplitude = 0.0;
  double interior_period_hours = 24.0;
  double interior_phase_hours = 0.0;
  double interior_noise = 0.0;  // sigma, K

  double exterior_mean = 5.0;
  double exterior_amplitude = 0.0;
  double exterior_period_hours = 24.0;
  double exterior_phase_hours = 0.0;
  double exterior_noise = 0.0;
  std::optional<StepChange> exterior_step;

  double flux_noise = 0.0;  // sigma, W/m²

  /// Steady: wall starts in equilibrium with the t = 0 boundaries.
  /// Uniform: every node starts at `initial_temperature`.
  InitialState initial = InitialState::Steady;
  double initial_temperature = 20.0;

  std::uint64_t seed = 0;  // default seed when none is given explicitly

  std::size_t sample_count() const;
  double interior_at(double seconds) const;
  double exterior_at(double seconds) const;

  friend bool operator==(const BoundaryScenario&, const BoundaryScenario&) = default;
};

/// Throws InvalidScenario.
void validate(const BoundaryScenario& scenario);

/// Interface-node RC network: node k sits between layer k-1 and layer k and
/// carries half of each adjacent layer's capacitance. Zero-capacitance nodes
/// are solved algebraically from their capacitive neighbours; capacitive
/// nodes are advanced with explicit Euler.
class RcWallModel {
 public:
  explicit RcWallModel(const WallSpec& wall);

  std::size_t node_count() const noexcept { return capacitance_.size(); }
  /// Smallest node time constant C / (1/R_left + 1/R_right) in seconds;
  /// infinity when no node stores heat.
  double min_time_constant() const noexcept;
  /// Largest sub-step allowed: 0.1 * min_time_constant().
  double max_substep() const noexcept;

  void set_steady(double t_internal, double t_external);
  void set_uniform(double temperature);

  /// One explicit Euler step of `dt` seconds with the given boundary
  /// temperatures held for the step.
  void euler_step(double dt, double t_internal, double t_external);

  /// All node temperatures with algebraic nodes resolved.
  std::vector<double> node_temperatures(double t_internal, double t_external) const;
  /// Heat flux through each resistance from interior to exterior
  /// (r_si, layer 0..n-1, r_se), W/m².
  std::vector<double> interface_fluxes(double t_internal, double t_external) const;
  /// (T_i - T_surface,i) / r_si
  double interior_flux(double t_internal, double t_external) const;

 private:
  std::vector<double> resistance_;   // n + 2 links: r_si, R_0 .. R_{n-1}, r_se
  std::vector<double> capacitance_;  // n + 1 nodes
  std::vector<double> temperature_;  // n + 1 nodes; only capacitive entries are state
};

/// Sub-steps per sample above which simulate() reports
/// UnstableConfiguration instead of running.
inline constexpr std::size_t kMaxSubsteps = 1'000'000;

/// Integrates the wall under the scenario and samples T_i, T_e and the
/// interior-surface flux every `scenario.step`. Gaussian noise is added to
/// the sampled values only.
MeasurementSeries simulate(const WallSpec& wall, const BoundaryScenario& scenario,
                           std::uint64_t seed);

nlohmann::json to_json(const WallSpec& wall);
WallSpec wall_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BoundaryScenario& scenario);
BoundaryScenario scenario_from_json(const nlohmann::json& j);

WallSpec load_wall(const std::filesystem::path& path);
BoundaryScenario load_scenario(const std::filesystem::path& path);

}  // namespace hfm::synth
