#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

#include "hfm/architectures.hpp"
#include "hfm/config.hpp"
#include "hfm/error.hpp"
#include "hfm/experiment.hpp"
#include "hfm/iso9869.hpp"
#include "hfm/series.hpp"
#include "hfm/synth.hpp"

namespace {

using namespace hfm;
using namespace hfm::synth;

TrainConfig config_or_default(const std::string& path) {
  return path.empty() ? TrainConfig{} : load_config(path);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const auto& item : split_list(text)) {
    try {
      std::size_t used = 0;
      seeds.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidConfig, "bad seed '" + item + "'");
    }
  }
  if (seeds.empty()) throw Error(ErrorCode::InvalidConfig, "no seeds given");
  return seeds;
}

int cmd_simulate(const std::string& wall_path, const std::string& scenario_path,
                 std::optional<std::uint64_t> seed, const std::string& out) {
  const WallSpec wall = load_wall(wall_path);
  const BoundaryScenario scenario = load_scenario(scenario_path);
  const MeasurementSeries series = simulate(wall, scenario, seed.value_or(scenario.seed));
  write_csv(series, out);
  std::printf("wrote %zu samples to %s (true U %.4f W/(m2K))\n", series.size(), out.c_str(),
              true_u(wall));
  return 0;
}

int cmd_uvalue(const std::string& csv, double window_hours, double tol) {
  const MeasurementSeries series = parse_csv(csv);
  const auto estimate = iso9869::average_u_value(series);
  std::printf("U = %.4f W/(m2K)  (%zu samples, mean dT %.3f K", estimate.u, estimate.n_samples,
              estimate.mean_delta_t);
  if (estimate.reversed_flux) std::printf(", flux direction reversed");
  std::printf(")\n");
  const auto window = std::chrono::seconds(static_cast<long long>(window_hours * 3600.0));
  const auto report = iso9869::stability_check(series, window, tol);
  std::printf("span %.2f h (%s 72 h), U without last %.4g h = %.4f, change %.2f%% (tol %.2f%%)\n",
              report.span_hours, report.span_ok ? ">=" : "<", window_hours,
              report.u_without_last_window, 100.0 * report.relative_change, 100.0 * tol);
  std::printf("stability: %s\n", report.stable ? "stable" : "not stable");
  return 0;
}

int cmd_train(const std::string& csv, const std::string& arch, const std::string& split,
              std::uint64_t seed, const std::string& out, const std::string& config_path) {
  const MeasurementSeries series = parse_csv(csv);
  const TrainConfig config = config_or_default(config_path);
  const SplitSpec spec = SplitSpec::parse(split);
  const TrainingRun run = train(arch, series, spec, seed, config);
  save_run(run, out);
  const auto u = predicted_u_value(run, series, spec);
  const auto measured = iso9869::average_u_value(hfm::split(series, spec).validation);
  std::printf("%s split %s seed %llu: %zu epochs, best loss %.6g at epoch %zu%s\n",
              run.architecture.c_str(), spec.label().c_str(),
              static_cast<unsigned long long>(seed), run.epoch_losses.size(),
              run.epoch_losses[run.best_epoch], run.best_epoch,
              run.converged ? "" : " (epoch limit)");
  std::printf("validation U: predicted %.4f, measured %.4f, rel. diff %.2f%%\n", u.validation.u,
              measured.u, 100.0 * iso9869::relative_difference(u.validation.u, measured.u));
  return 0;
}

int cmd_predict(const std::string& checkpoint, const std::string& csv, const std::string& out) {
  const TrainingRun run = load_run(checkpoint);
  const MeasurementSeries series = parse_csv(csv);
  const std::vector<double> q = predict(run, series);
  std::string text = "timestamp,t_internal_c,t_external_c,measured,predicted\n";
  for (std::size_t t = 0; t < series.size(); ++t) {
    const Sample& s = series[t];
    text += format_timestamp(s.timestamp) + "," + format_double(s.t_internal) + "," +
            format_double(s.t_external) + "," + format_double(s.heat_flux) + "," +
            format_double(q[t]) + "\n";
  }
  write_text_file(out, text);
  std::printf("wrote %zu predictions to %s\n", q.size(), out.c_str());
  return 0;
}

int cmd_grid(const std::string& csv, const std::string& seeds, const std::string& out,
             const std::string& archs, const std::string& splits, const std::string& config_path) {
  const MeasurementSeries series = parse_csv(csv);
  const TrainConfig config = config_or_default(config_path);
  const std::vector<std::string> arch_list =
      archs.empty() ? standard_architectures() : split_list(archs);
  std::vector<SplitSpec> split_list_parsed;
  for (const auto& s : split_list(splits.empty() ? "1/4,1/2,2/3" : splits))
    split_list_parsed.push_back(SplitSpec::parse(s));
  const auto grid =
      experiment::run_grid(series, arch_list, split_list_parsed, parse_seeds(seeds), config);
  experiment::write_grid_outputs(grid, series, out);
  std::fputs(experiment::format_table(grid.report).c_str(), stdout);
  for (const auto& c : grid.report.cells)
    if (!c.ok)
      std::fprintf(stderr, "%s %s seed %llu failed: %s\n", c.architecture.c_str(),
                   c.split.label().c_str(), static_cast<unsigned long long>(c.global_seed),
                   c.error_message.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heat flux method U-value estimation and neural heat flux prediction"};
  app.require_subcommand(1);

  std::string wall, scenario, out, csv, arch, split = "1/2", checkpoint, config, seeds, archs,
                                                splits;
  std::optional<std::uint64_t> sim_seed;
  std::uint64_t seed = 0;
  double window_hours = 24.0, tol = 0.05;

  auto* sim = app.add_subcommand("simulate", "Simulate an RC wall under a boundary scenario");
  sim->add_option("--wall", wall, "Wall JSON file")->required();
  sim->add_option("--scenario", scenario, "Scenario JSON file")->required();
  sim->add_option("--seed", sim_seed, "Noise seed (defaults to the scenario's)");
  sim->add_option("-o,--output", out, "Output CSV")->required();

  auto* uv = app.add_subcommand("uvalue", "Average-method U-value and stability check");
  uv->add_option("csv", csv)->required();
  uv->add_option("--window-hours", window_hours, "Stability window in hours");
  uv->add_option("--tol", tol, "Relative stability tolerance");

  auto* tr = app.add_subcommand("train", "Train one network on the training segment");
  tr->add_option("csv", csv)->required();
  tr->add_option("--arch", arch, "mlp3, lstm100, gru100, lstmgru100 or a layer chain")
      ->required();
  tr->add_option("--split", split, "Train/validation ratio, e.g. 1/2");
  tr->add_option("--seed", seed, "Initialisation seed");
  tr->add_option("-o,--output", out, "Checkpoint JSON")->required();
  tr->add_option("--config", config, "Training config JSON");

  auto* pr = app.add_subcommand("predict", "Predict heat flux with a checkpoint");
  pr->add_option("checkpoint", checkpoint)->required();
  pr->add_option("csv", csv)->required();
  pr->add_option("-o,--output", out, "Output CSV")->required();

  auto* gr = app.add_subcommand("grid", "Architecture x split x seed grid with report");
  gr->add_option("csv", csv)->required();
  gr->add_option("--seeds", seeds, "Comma-separated global seeds")->required();
  gr->add_option("-o,--output", out, "Report directory")->required();
  gr->add_option("--archs", archs, "Comma-separated architectures");
  gr->add_option("--splits", splits, "Comma-separated ratios");
  gr->add_option("--config", config, "Training config JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*sim) return cmd_simulate(wall, scenario, sim_seed, out);
    if (*uv) return cmd_uvalue(csv, window_hours, tol);
    if (*tr) return cmd_train(csv, arch, split, seed, out, config);
    if (*pr) return cmd_predict(checkpoint, csv, out);
    if (*gr) return cmd_grid(csv, seeds, out, archs, splits, config);
  } catch (const hfm::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return hfm::exit_code(e.code());
  }
  return 1;
}
