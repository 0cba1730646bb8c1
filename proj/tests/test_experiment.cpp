#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "hfm/error.hpp"
#include "hfm/experiment.hpp"
#include "hfm/synth.hpp"
#include "support.hpp"

using namespace hfm;
using namespace hfm::experiment;

namespace {

MeasurementSeries preset_series(const std::string& scenario, double hours = 0) {
  const auto wall = synth::load_wall(hfm::testing::preset("wall_masonry.json"));
  auto sc = synth::load_scenario(hfm::testing::preset(scenario));
  if (hours > 0) sc.duration_hours = hours;
  return synth::simulate(wall, sc, sc.seed);
}

TrainConfig quick(std::size_t epochs = 40) {
  TrainConfig c;
  c.max_epochs = epochs;
  c.cell_activation = nn::Activation::Tanh;
  return c;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("hfm_experiment_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Grid, SmokeSingleCell) {
  const auto s = preset_series("sinusoidal.json", 24);
  const auto grid = run_grid(s, {"MLP3"}, {SplitSpec(1, 2)}, {1}, quick());
  ASSERT_EQ(grid.report.cells.size(), 1u);
  const auto& c = grid.report.cells[0];
  EXPECT_TRUE(c.ok);
  EXPECT_TRUE(std::isfinite(c.metrics.rmse));
  EXPECT_TRUE(std::isfinite(c.metrics.mse));
  EXPECT_TRUE(std::isfinite(c.metrics.mae));
  EXPECT_TRUE(std::isfinite(c.predicted_validation.u));
  EXPECT_TRUE(c.best_in_split);
  EXPECT_TRUE(grid.report.spread.empty());
}

TEST(Grid, TwelveRowsThreeMarkers) {
  const auto s = preset_series("sinusoidal.json", 24);
  const std::vector<std::string> archs{"MLP3", "LSTM3", "GRU3", "LSTM2+GRU2"};
  const std::vector<SplitSpec> splits{SplitSpec(1, 4), SplitSpec(1, 2), SplitSpec(2, 3)};
  const auto grid = run_grid(s, archs, splits, {1}, quick(20));
  ASSERT_EQ(grid.report.cells.size(), 12u);
  EXPECT_EQ(grid.report.best_marker_count(), 3u);
  for (const auto& sp : splits) {
    const CellResult* best = nullptr;
    for (const auto& c : grid.report.cells)
      if (c.split == sp && (!best || c.metrics.rmse < best->metrics.rmse)) best = &c;
    EXPECT_TRUE(best->best_in_split);
  }
  const std::string table = format_table(grid.report);
  EXPECT_NE(table.find("LSTM2+GRU2"), std::string::npos);
  EXPECT_NE(table.find("1/4"), std::string::npos);
}

TEST(Grid, FailedCellsAreReportedNotFatal) {
  const auto s = preset_series("sinusoidal.json", 24);
  TrainConfig diverge = quick(200);
  diverge.optimizer.kind = nn::OptimizerKind::Sgd;
  diverge.optimizer.learning_rate = 1e6;
  const auto grid = run_grid(s, {"GRU3"}, {SplitSpec(1, 2), SplitSpec(2, 3)}, {1}, diverge);
  ASSERT_EQ(grid.report.cells.size(), 2u);
  for (const auto& c : grid.report.cells) {
    EXPECT_FALSE(c.ok);
    EXPECT_EQ(c.error, ErrorCode::DivergedLoss);
  }
  EXPECT_EQ(grid.report.best_marker_count(), 0u);
  EXPECT_NE(format_table(grid.report).find("DivergedLoss"), std::string::npos);
}

TEST(Grid, UnknownArchitectureFailsFast) {
  const auto s = preset_series("sinusoidal.json", 24);
  try {
    run_grid(s, {"MLP3", "TRANSFORMER"}, {SplitSpec(1, 2)}, {1}, quick());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownArchitecture);
  }
}

TEST(Grid, MetricsMatchExportedFiles) {
  const auto s = preset_series("sinusoidal.json", 24);
  const auto grid = run_grid(s, {"MLP3", "GRU3"}, {SplitSpec(1, 2)}, {1}, quick());
  const auto dir = scratch_dir("metrics");
  write_grid_outputs(grid, s, dir);
  for (const auto& c : grid.report.cells) {
    const auto rows = read_plot_series(dir / "plots" / (c.architecture + "_1-2_s1_series.csv"));
    std::vector<double> p, a;
    for (const auto& r : rows)
      if (r.validation) {
        p.push_back(r.predicted);
        a.push_back(r.measured);
      }
    const auto m = iso9869::metrics(p, a);
    EXPECT_NEAR(m.rmse, c.metrics.rmse, 1e-9);
    EXPECT_NEAR(m.mse, c.metrics.mse, 1e-9);
    EXPECT_NEAR(m.mae, c.metrics.mae, 1e-9);
  }
  std::filesystem::remove_all(dir);
}

TEST(Grid, SpreadOverSeeds) {
  const auto s = preset_series("sinusoidal.json", 24);
  const auto grid = run_grid(s, {"MLP3"}, {SplitSpec(1, 2)}, {1, 2, 3}, quick());
  ASSERT_EQ(grid.report.spread.size(), 1u);
  const auto& sp = grid.report.spread[0];
  EXPECT_EQ(sp.successful, 3u);
  double mean = 0;
  for (const auto& c : grid.report.cells) mean += c.metrics.rmse / 3.0;
  EXPECT_NEAR(sp.rmse_mean, mean, 1e-12);
  EXPECT_GT(sp.rmse_std, 0.0);
}

TEST(Grid, IndependentOfOrderAndParallelism) {
  const auto s = preset_series("sinusoidal.json", 24);
  TrainConfig serial = quick(15), parallel = quick(15);
  serial.workers = 1;
  parallel.workers = 4;
  const std::vector<SplitSpec> splits{SplitSpec(1, 2), SplitSpec(2, 3)};
  const auto a = run_grid(s, {"MLP3", "GRU3"}, splits, {5}, serial);
  const auto b = run_grid(s, {"GRU3", "MLP3"}, {splits[1], splits[0]}, {5}, parallel);
  for (const auto& ca : a.report.cells) {
    bool found = false;
    for (const auto& cb : b.report.cells)
      if (cb.architecture == ca.architecture && cb.split == ca.split) {
        found = true;
        EXPECT_EQ(cb.seed, ca.seed);
        EXPECT_EQ(cb.metrics, ca.metrics);
        EXPECT_EQ(cb.predicted_validation, ca.predicted_validation);
      }
    EXPECT_TRUE(found);
  }
  const auto c = run_grid(s, {"MLP3", "GRU3"}, splits, {5}, parallel);
  EXPECT_EQ(to_json(c.report).dump(), to_json(a.report).dump());
}

TEST(CellSeed, IndependentPerCell) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t g : {0u, 1u, 2u})
    for (const char* arch : {"MLP3", "LSTM100", "GRU100", "LSTMGRU100"})
      for (auto sp : {SplitSpec(1, 4), SplitSpec(1, 2), SplitSpec(2, 3)})
        EXPECT_TRUE(seen.insert(cell_seed(g, arch, sp)).second);
  EXPECT_EQ(cell_seed(1, "mlp3", SplitSpec(1, 2)), cell_seed(1, "MLP3", SplitSpec(2, 4)));
}

TEST(Report, JsonRoundTripIsLossless) {
  const auto s = preset_series("sinusoidal.json", 24);
  TrainConfig diverge = quick(200);
  auto grid = run_grid(s, {"MLP3", "GRU3"}, {SplitSpec(1, 4), SplitSpec(1, 2)}, {1, 2}, quick(10));
  // Include a failed cell.
  grid.report.cells[0].ok = false;
  grid.report.cells[0].error = ErrorCode::DivergedLoss;
  grid.report.cells[0].error_message = "DivergedLoss: test";
  grid.report.cells[0].metrics = {};
  grid.report.cells[0].predicted_validation = {};
  grid.report.cells[0].predicted_full = {};
  grid.report.cells[0].measured_validation = {};
  grid.report.cells[0].relative_difference = 0;
  grid.report.cells[0].best_in_split = false;
  grid.report.cells[0].epochs = 0;
  grid.report.cells[0].best_loss = 0;
  const auto back = report_from_json(nlohmann::json::parse(to_json(grid.report).dump()));
  EXPECT_EQ(back, grid.report);
}

TEST(Report, RejectsForeignJson) {
  try {
    report_from_json(nlohmann::json{{"format", "something-else"}, {"version", 1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FormatError);
  }
}

TEST(Extrapolation, RepeatedPatternGivesNoFlags) {
  // Exactly periodic boundaries, validation repeats training values.
  const auto s = hfm::testing::make_series(96, [](std::size_t k) {
    const double phase = double(k % 12);
    return std::tuple{20.0 + 0.1 * phase, 5.0 - 0.3 * phase, 8.0 + 0.2 * phase};
  });
  const auto run = train("mlp3", s, SplitSpec(1, 2), 1, quick(5));
  const auto r = detect_extrapolation(run, s, SplitSpec(1, 2));
  EXPECT_EQ(r.validation_start, 48u);
  EXPECT_EQ(r.flags.size(), 48u);
  EXPECT_EQ(r.flagged_count(), 0u);
  EXPECT_TRUE(r.intervals.empty());
}

TEST(Extrapolation, InfiniteMarginNeverFlags) {
  const auto s = preset_series("step_change.json");
  const auto run = train("mlp3", s, SplitSpec(1, 2), 1, quick(5));
  const auto r = detect_extrapolation(run, s, SplitSpec(1, 2), std::numeric_limits<double>::infinity());
  EXPECT_EQ(r.flagged_count(), 0u);
}

TEST(Extrapolation, StepChangeStartsFlaggedInterval) {
  const auto s = preset_series("step_change.json");
  const auto sc = synth::load_scenario(hfm::testing::preset("step_change.json"));
  const std::size_t step_index =
      static_cast<std::size_t>(sc.exterior_step->time_hours * 3600.0 / double(sc.step.count()));
  const SplitSpec spec(1, 2);
  const auto run = train("mlp3", s, spec, 1, quick(5));
  const auto r = detect_extrapolation(run, s, spec);
  ASSERT_FALSE(r.intervals.empty());
  const auto& first = r.intervals.front();
  EXPECT_LE(std::max(first.first, step_index) - std::min(first.first, step_index), 1u);
  EXPECT_TRUE(first.external);
  EXPECT_EQ(first.last, s.size() - 1);

  // Direct range comparison on raw temperatures.
  const auto train_part = split(s, spec).train;
  double lo = 1e300, hi = -1e300;
  for (const auto& x : train_part.samples()) {
    lo = std::min(lo, x.t_external);
    hi = std::max(hi, x.t_external);
  }
  for (std::size_t k = train_part.size(); k < s.size(); ++k) {
    const bool outside = s[k].t_external < lo || s[k].t_external > hi;
    EXPECT_EQ(r.flags[k - train_part.size()].external, outside) << k;
  }
}

TEST(PlotExport, RoundTripMarkerAndPerfectPredictor) {
  const auto s = preset_series("sinusoidal.json", 24);
  const auto dir = scratch_dir("plot");
  const auto q = s.heat_fluxes();
  for (auto sp : {SplitSpec(1, 4), SplitSpec(1, 2), SplitSpec(2, 3)}) {
    const auto prefix = dir / ("perfect_" + std::to_string(sp.denominator));
    export_plot_data(q, s, sp, prefix);
    const auto rows = read_plot_series(prefix.string() + "_series.csv");
    ASSERT_EQ(rows.size(), s.size());
    const std::size_t boundary = s.size() * sp.numerator / sp.denominator;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      EXPECT_EQ(rows[k].split_marker, k == boundary);
      EXPECT_EQ(rows[k].validation, k >= boundary);
      EXPECT_EQ(rows[k].timestamp, s[k].timestamp);
      EXPECT_EQ(rows[k].measured, rows[k].predicted);
    }
    std::ifstream scatter(prefix.string() + "_scatter.csv");
    std::string line;
    std::getline(scatter, line);
    std::size_t n = 0;
    while (std::getline(scatter, line)) {
      const auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
      EXPECT_EQ(line.substr(0, c1), line.substr(c1 + 1, c2 - c1 - 1));
      ++n;
    }
    EXPECT_EQ(n, s.size());
  }
  std::filesystem::remove_all(dir);
}

TEST(PlotExport, LengthMismatch) {
  const auto s = preset_series("sinusoidal.json", 24);
  const std::vector<double> q(3, 0.0);
  try {
    export_plot_data(q, s, SplitSpec(1, 2), scratch_dir("short") / "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
  }
}

TEST(GridOutputs, ByteIdenticalAcrossRuns) {
  const auto s = preset_series("sinusoidal.json", 24);
  const auto d1 = scratch_dir("det1"), d2 = scratch_dir("det2");
  for (const auto& d : {d1, d2}) {
    const auto grid = run_grid(s, {"MLP3", "LSTM2+GRU2"}, {SplitSpec(1, 2)}, {3}, quick(15));
    write_grid_outputs(grid, s, d);
  }
  std::size_t files = 0;
  for (const auto& e : std::filesystem::recursive_directory_iterator(d1)) {
    if (!e.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(e.path(), d1);
    EXPECT_EQ(slurp(e.path()), slurp(d2 / rel)) << rel;
    ++files;
  }
  EXPECT_EQ(files, 3u + 2u * 2u);
  std::filesystem::remove_all(d1);
  std::filesystem::remove_all(d2);
}
