#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "hfm/error.hpp"
#include "hfm/iso9869.hpp"
#include "hfm/synth.hpp"
#include "support.hpp"

using namespace hfm;
using namespace hfm::synth;

namespace {

WallSpec masonry() {
  return {{{0.02, 20000}, {0.5, 300000}, {1.0, 2000}, {0.0165, 15000}}, 0.13, 0.04};
}

BoundaryScenario constant(double hours, double ti, double te) {
  BoundaryScenario s;
  s.duration_hours = hours;
  s.interior_mean = ti;
  s.exterior_mean = te;
  return s;
}

double total_capacitance(const WallSpec& w) {
  double c = 0;
  for (const auto& l : w.layers) c += l.capacitance;
  return c;
}

}  // namespace

TEST(TrueU, Examples) {
  EXPECT_NEAR(true_u({{{1.5, 0}}, 0.13, 0.04}), 1.0 / 1.67, 1e-15);
  EXPECT_NEAR(true_u({{{1.5, 0}}, 0.13, 0.04}), 0.5988, 5e-5);
  EXPECT_NEAR(true_u(masonry()), 1.0 / 1.7065, 1e-15);
  EXPECT_NEAR(true_u(masonry()), 0.586, 5e-4);
  WallSpec doubled = masonry();
  for (auto& l : doubled.layers) l.resistance *= 2;
  doubled.r_si *= 2;
  doubled.r_se *= 2;
  EXPECT_NEAR(true_u(doubled), true_u(masonry()) / 2, 1e-15);
}

TEST(TrueU, PresetsMatch) {
  EXPECT_NEAR(true_u(load_wall(hfm::testing::preset("wall_single.json"))), 0.5988, 5e-5);
  EXPECT_NEAR(true_u(load_wall(hfm::testing::preset("wall_masonry.json"))), 0.586, 5e-4);
}

TEST(Wall, InvalidSpecsRejected) {
  for (const WallSpec& w : {WallSpec{{}, 0.13, 0.04}, WallSpec{{{-1.0, 0}}, 0.13, 0.04},
                            WallSpec{{{1.0, -5}}, 0.13, 0.04}, WallSpec{{{1.0, 0}}, 0.0, 0.04}}) {
    try {
      validate(w);
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidWall);
    }
  }
}

TEST(Simulate, ZeroCapacitanceGivesSteadyFlux) {
  const WallSpec wall{{{1.83, 0.0}}, 0.13, 0.04};
  const auto s = simulate(wall, constant(24, 20, 0), 1);
  for (const auto& x : s.samples()) EXPECT_NEAR(x.heat_flux, 10.0, 1e-12);
}

TEST(Simulate, ZeroCapacitanceFollowsBoundariesInstantly) {
  WallSpec wall{{{0.5, 0.0}, {1.0, 0.0}}, 0.13, 0.04};
  auto sc = constant(24, 20, 0);
  sc.exterior_amplitude = 5;
  const auto s = simulate(wall, sc, 1);
  const double u = true_u(wall);
  for (const auto& x : s.samples()) EXPECT_NEAR(x.heat_flux, u * x.delta_t(), 1e-12);
}

TEST(Simulate, RelaxesToSteadyStateAfterTenTimeConstants) {
  for (const WallSpec& wall : {WallSpec{{{1.5, 200000}}, 0.13, 0.04}, masonry()}) {
    // Slowest mode is bounded by total resistance times total capacitance.
    const double tau_h = (1.0 / true_u(wall)) * total_capacitance(wall) / 3600.0;
    auto sc = constant(10 * tau_h, 20, 0);
    sc.initial = InitialState::Uniform;
    sc.initial_temperature = 20;
    sc.step = std::chrono::seconds(3600);
    const auto s = simulate(wall, sc, 1);
    const double expect = true_u(wall) * 20.0;
    EXPECT_LT(std::abs(s.back().heat_flux - expect) / expect, 1e-3);
    // The flux starts far from equilibrium.
    EXPECT_GT(std::abs(s.front().heat_flux - expect) / expect, 0.5);
  }
}

TEST(Simulate, InterfaceFluxesAgreeAtSteadyState) {
  const WallSpec wall = masonry();
  RcWallModel model(wall);
  model.set_uniform(5.0);
  const double tau = (1.0 / true_u(wall)) * total_capacitance(wall);
  const double dt = model.max_substep();
  for (double t = 0; t < 10 * tau; t += dt) model.euler_step(dt, 20.0, 0.0);
  const auto fluxes = model.interface_fluxes(20.0, 0.0);
  const double expect = true_u(wall) * 20.0;
  for (double f : fluxes) EXPECT_LT(std::abs(f - expect) / expect, 1e-3);
}

TEST(Simulate, SteadyInitialStateHasLinearProfile) {
  const WallSpec wall = masonry();
  RcWallModel model(wall);
  model.set_steady(20.0, 0.0);
  const auto fluxes = model.interface_fluxes(20.0, 0.0);
  for (double f : fluxes) EXPECT_NEAR(f, true_u(wall) * 20.0, 1e-10);
}

TEST(Simulate, PeriodicAfterTransient) {
  auto sc = constant(24 * 12, 20, 5);
  sc.exterior_amplitude = 6;
  sc.exterior_period_hours = 24;
  sc.initial = InitialState::Uniform;
  sc.initial_temperature = 15;
  const auto s = simulate(masonry(), sc, 1);
  const std::size_t period = 24 * 6;
  const std::size_t n = s.size();
  double max_dev = 0, max_q = 0;
  for (std::size_t k = n - period; k < n; ++k) {
    max_dev = std::max(max_dev, std::abs(s[k].heat_flux - s[k - period].heat_flux));
    max_q = std::max(max_q, std::abs(s[k].heat_flux));
  }
  EXPECT_LT(max_dev / max_q, 5e-3);
}

TEST(Simulate, NoiseFreeSteadyRecoversTrueU) {
  const WallSpec wall = load_wall(hfm::testing::preset("wall_single.json"));
  const auto sc = load_scenario(hfm::testing::preset("steady.json"));
  const auto s = simulate(wall, sc, sc.seed);
  EXPECT_LT(hfm::testing::rel_err(iso9869::average_u_value(s).u, true_u(wall)), 0.01);
}

TEST(Simulate, SampleCountAndTimestamps) {
  auto sc = constant(81.5, 20, 0);
  const auto s = simulate(masonry(), sc, 1);
  EXPECT_EQ(s.size(), 490u);
  EXPECT_EQ(format_timestamp(s.front().timestamp), "2019-02-22T14:00:00Z");
  EXPECT_EQ(s.step(), std::chrono::seconds(600));
}

TEST(Simulate, DeterministicGivenSeed) {
  auto sc = constant(48, 20, 3);
  sc.exterior_amplitude = 4;
  sc.interior_noise = 0.1;
  sc.exterior_noise = 0.2;
  sc.flux_noise = 0.5;
  const auto a = simulate(masonry(), sc, 99);
  const auto b = simulate(masonry(), sc, 99);
  const auto c = simulate(masonry(), sc, 100);
  EXPECT_TRUE(std::equal(a.samples().begin(), a.samples().end(), b.samples().begin()));
  EXPECT_FALSE(std::equal(a.samples().begin(), a.samples().end(), c.samples().begin()));
}

TEST(Simulate, NoiseIsAddedAfterSampling) {
  auto sc = constant(96, 20, 3);
  sc.exterior_amplitude = 4;
  const auto clean = simulate(masonry(), sc, 5);
  sc.flux_noise = 0.5;
  const auto noisy = simulate(masonry(), sc, 5);
  double s = 0, s2 = 0;
  for (std::size_t k = 0; k < clean.size(); ++k) {
    EXPECT_EQ(clean[k].t_external, noisy[k].t_external);
    const double e = noisy[k].heat_flux - clean[k].heat_flux;
    s += e;
    s2 += e * e;
  }
  const double n = static_cast<double>(clean.size());
  EXPECT_NEAR(std::sqrt(s2 / n - (s / n) * (s / n)), 0.5, 0.05);
}

TEST(Simulate, StepChangeAppliesAtConfiguredTime) {
  auto sc = constant(12, 20, 0);
  sc.exterior_step = StepChange{6.0, 8.0};
  const auto s = simulate(masonry(), sc, 1);
  EXPECT_EQ(s[35].t_external, 0.0);
  EXPECT_EQ(s[36].t_external, 8.0);
}

TEST(Simulate, StiffWallIsReportedNotSubsampled) {
  const WallSpec stiff{{{0.01, 1e-3}}, 0.13, 0.04};
  try {
    simulate(stiff, constant(1, 20, 0), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnstableConfiguration);
  }
}

TEST(Simulate, SubstepBound) {
  RcWallModel model(masonry());
  EXPECT_LE(model.max_substep(), 0.1 * model.min_time_constant() * (1 + 1e-12));
}

TEST(Scenario, JsonRoundTrip) {
  for (const char* name : {"steady.json", "steady_noisy.json", "sinusoidal.json", "step_change.json"}) {
    const auto sc = load_scenario(hfm::testing::preset(name));
    EXPECT_EQ(scenario_from_json(to_json(sc)), sc) << name;
  }
  const auto w = load_wall(hfm::testing::preset("wall_masonry.json"));
  const auto back = wall_from_json(to_json(w));
  EXPECT_EQ(back.layers.size(), w.layers.size());
  EXPECT_EQ(true_u(back), true_u(w));
}

TEST(Scenario, InvalidRejected) {
  auto sc = constant(24, 20, 0);
  sc.flux_noise = -1;
  try {
    validate(sc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidScenario);
  }
}
