#include "hfm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "hfm/nn/rng.hpp"

namespace hfm::experiment {

// -- extrapolation --------------------------------------------------------------

std::size_t ExtrapolationReport::flagged_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(flags.begin(), flags.end(), [](const auto& f) { return f.any(); }));
}

ExtrapolationReport detect_extrapolation(const TrainingRun& run, const MeasurementSeries& series,
                                         SplitSpec split, double margin) {
  const std::size_t n_train = hfm::split(series, split).train.size();
  const Normalizer& norm = run.normalizer;
  double lo[2] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  double hi[2] = {-lo[0], -lo[1]};
  auto normalized = [&](std::size_t t) {
    return std::pair{norm.apply(Channel::Internal, series[t].t_internal),
                     norm.apply(Channel::External, series[t].t_external)};
  };
  for (std::size_t t = 0; t < n_train; ++t) {
    const auto [a, b] = normalized(t);
    lo[0] = std::min(lo[0], a);
    hi[0] = std::max(hi[0], a);
    lo[1] = std::min(lo[1], b);
    hi[1] = std::max(hi[1], b);
  }
  ExtrapolationReport report;
  report.validation_start = n_train;
  auto outside = [&](double v, int c) { return v < lo[c] - margin || v > hi[c] + margin; };
  for (std::size_t t = n_train; t < series.size(); ++t) {
    const auto [a, b] = normalized(t);
    ExtrapolationFlag f{outside(a, 0), outside(b, 1)};
    report.flags.push_back(f);
    if (!f.any()) continue;
    if (!report.intervals.empty() && report.intervals.back().last + 1 == t) {
      auto& iv = report.intervals.back();
      iv.last = t;
      iv.last_time = series[t].timestamp;
      iv.internal |= f.internal;
      iv.external |= f.external;
    } else {
      report.intervals.push_back(
          {t, t, series[t].timestamp, series[t].timestamp, f.internal, f.external});
    }
  }
  return report;
}

// -- grid -------------------------------------------------------------------------

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

}  // namespace

std::uint64_t cell_seed(std::uint64_t global_seed, std::string_view architecture, SplitSpec split) {
  const std::string key =
      std::to_string(global_seed) + "|" + upper(architecture) + "|" + split.label();
  return nn::mix64(nn::fnv1a64(key));
}

std::size_t UValueReport::best_marker_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const auto& c) { return c.best_in_split; }));
}

void mark_best(UValueReport& report) {
  for (auto& c : report.cells) c.best_in_split = false;
  std::vector<SplitSpec> seen;
  for (const auto& c : report.cells)
    if (std::find(seen.begin(), seen.end(), c.split) == seen.end()) seen.push_back(c.split);
  for (const auto& s : seen) {
    CellResult* best = nullptr;
    for (auto& c : report.cells)
      if (c.ok && c.split == s && (!best || c.metrics.rmse < best->metrics.rmse)) best = &c;
    if (best) best->best_in_split = true;
  }
}

namespace {

void evaluate_cell(const MeasurementSeries& series, const TrainConfig& config, CellResult& cell,
                   std::optional<TrainingRun>& run_out, std::vector<double>& predictions,
                   std::optional<ExtrapolationReport>& extrapolation) {
  try {
    TrainingRun run = train(cell.architecture, series, cell.split, cell.seed, config);
    predictions = predict(run, series);
    const auto parts = hfm::split(series, cell.split);
    const std::size_t n_train = parts.train.size();
    const std::span<const double> pred_val = std::span<const double>(predictions).subspan(n_train);
    const std::vector<double> actual_val = parts.validation.heat_fluxes();
    cell.metrics = iso9869::metrics(pred_val, actual_val);
    const PredictedU u = predicted_u_value(predictions, series, cell.split);
    cell.predicted_validation = u.validation;
    cell.predicted_full = u.full;
    cell.measured_validation = iso9869::average_u_value(parts.validation);
    cell.relative_difference =
        iso9869::relative_difference(u.validation.u, cell.measured_validation.u);
    cell.epochs = run.epoch_losses.size();
    cell.best_loss = run.epoch_losses[run.best_epoch];
    extrapolation = detect_extrapolation(run, series, cell.split, config.extrapolation_margin);
    run_out = std::move(run);
    cell.ok = true;
  } catch (const Error& e) {
    cell.ok = false;
    cell.error = e.code();
    cell.error_message = e.what();
    predictions.clear();
    run_out.reset();
    extrapolation.reset();
  }
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

GridResult run_grid(const MeasurementSeries& series, const std::vector<std::string>& architectures,
                    const std::vector<SplitSpec>& splits, const std::vector<std::uint64_t>& seeds,
                    const TrainConfig& config) {
  if (architectures.empty() || splits.empty() || seeds.empty())
    throw Error(ErrorCode::InvalidConfig, "grid needs at least one architecture, split and seed");
  for (const auto& a : architectures) build(a, config.cell_activation);  // fail fast on names

  GridResult grid;
  auto& report = grid.report;
  report.measured_full = iso9869::average_u_value(series);
  report.samples = series.size();
  for (const auto& a : architectures)
    for (const auto& s : splits)
      for (const auto g : seeds) {
        CellResult c;
        c.architecture = a;
        c.split = s;
        c.global_seed = g;
        c.seed = cell_seed(g, a, s);
        report.cells.push_back(std::move(c));
      }
  const std::size_t n = report.cells.size();
  grid.runs.resize(n);
  grid.predictions.resize(n);
  grid.extrapolation.resize(n);

  std::size_t workers = config.workers == 0 ? std::thread::hardware_concurrency() : config.workers;
  workers = std::clamp<std::size_t>(workers, 1, n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++)
      evaluate_cell(series, config, report.cells[i], grid.runs[i], grid.predictions[i],
                    grid.extrapolation[i]);
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  mark_best(report);

  if (seeds.size() > 1) {
    for (const auto& a : architectures)
      for (const auto& s : splits) {
        std::vector<double> rmse, u;
        for (const auto& c : report.cells)
          if (c.ok && c.architecture == a && c.split == s) {
            rmse.push_back(c.metrics.rmse);
            u.push_back(c.predicted_validation.u);
          }
        SpreadSummary sum{a, s, rmse.size()};
        if (!rmse.empty()) {
          sum.rmse_mean = mean_of(rmse);
          sum.rmse_std = std_of(rmse, sum.rmse_mean);
          sum.u_mean = mean_of(u);
          sum.u_std = std_of(u, sum.u_mean);
        }
        report.spread.push_back(sum);
      }
  }
  return grid;
}

// -- report I/O ---------------------------------------------------------------------

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

std::string pad_right(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::string format_table(const UValueReport& report) {
  std::ostringstream out;
  out << "Heat flux prediction and U-value comparison\n";
  out << "samples: " << report.samples << ", measured U (full series, average method): "
      << fixed(report.measured_full.u, 4) << " W/(m2K)\n\n";
  out << pad_right("ANN type", 14) << pad_right("train/val", 10) << pad("seed", 6)
      << pad("RMSE", 9) << pad("MSE", 10) << pad("MAE", 9) << pad("pred. U", 10)
      << pad("meas. U", 10) << pad("rel. diff", 11) << pad("pred. U full", 14) << "  best\n";
  for (const auto& c : report.cells) {
    out << pad_right(c.architecture, 14) << pad_right(c.split.label(), 10)
        << pad(std::to_string(c.global_seed), 6);
    if (!c.ok) {
      out << "  failed: " << (c.error ? std::string(to_string(*c.error)) : std::string("error"))
          << "\n";
      continue;
    }
    out << pad(fixed(c.metrics.rmse, 3), 9) << pad(fixed(c.metrics.mse, 3), 10)
        << pad(fixed(c.metrics.mae, 3), 9) << pad(fixed(c.predicted_validation.u, 4), 10)
        << pad(fixed(c.measured_validation.u, 4), 10)
        << pad(fixed(100.0 * c.relative_difference, 2) + "%", 11)
        << pad(fixed(c.predicted_full.u, 4), 14) << (c.best_in_split ? "  *" : "") << "\n";
  }
  out << "\n* lowest validation RMSE for that train/validation ratio\n";
  if (!report.spread.empty()) {
    out << "\nSpread over seeds\n";
    out << pad_right("ANN type", 14) << pad_right("train/val", 10) << pad("runs", 6)
        << pad("RMSE mean", 11) << pad("RMSE sd", 9) << pad("U mean", 9) << pad("U sd", 9)
        << "\n";
    for (const auto& s : report.spread) {
      out << pad_right(s.architecture, 14) << pad_right(s.split.label(), 10)
          << pad(std::to_string(s.successful), 6) << pad(fixed(s.rmse_mean, 3), 11)
          << pad(fixed(s.rmse_std, 3), 9) << pad(fixed(s.u_mean, 4), 9)
          << pad(fixed(s.u_std, 4), 9) << "\n";
    }
  }
  return out.str();
}

namespace {

nlohmann::json estimate_json(const iso9869::UValueEstimate& e) {
  return {{"u", e.u},
          {"n_samples", e.n_samples},
          {"mean_delta_t", e.mean_delta_t},
          {"reversed_flux", e.reversed_flux}};
}

iso9869::UValueEstimate estimate_from(const nlohmann::json& j) {
  return {j.at("u").get<double>(), j.at("n_samples").get<std::size_t>(),
          j.at("mean_delta_t").get<double>(), j.at("reversed_flux").get<bool>()};
}

std::optional<ErrorCode> parse_code(const std::string& s) {
  for (int c = 0; c <= static_cast<int>(ErrorCode::FormatError); ++c)
    if (to_string(static_cast<ErrorCode>(c)) == s) return static_cast<ErrorCode>(c);
  return std::nullopt;
}

}  // namespace

nlohmann::json to_json(const UValueReport& report) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : report.cells) {
    nlohmann::json j = {{"architecture", c.architecture},
                        {"split", c.split.label()},
                        {"global_seed", c.global_seed},
                        {"seed", c.seed},
                        {"ok", c.ok}};
    if (!c.ok) {
      j["error"] = c.error ? std::string(to_string(*c.error)) : std::string();
      j["error_message"] = c.error_message;
    } else {
      j["metrics"] = {{"rmse", c.metrics.rmse}, {"mse", c.metrics.mse}, {"mae", c.metrics.mae}};
      j["predicted_u_validation"] = estimate_json(c.predicted_validation);
      j["predicted_u_full"] = estimate_json(c.predicted_full);
      j["measured_u_validation"] = estimate_json(c.measured_validation);
      j["relative_difference"] = c.relative_difference;
      j["best_in_split"] = c.best_in_split;
      j["epochs"] = c.epochs;
      j["best_loss"] = c.best_loss;
    }
    cells.push_back(std::move(j));
  }
  nlohmann::json spread = nlohmann::json::array();
  for (const auto& s : report.spread)
    spread.push_back({{"architecture", s.architecture},
                      {"split", s.split.label()},
                      {"successful", s.successful},
                      {"rmse_mean", s.rmse_mean},
                      {"rmse_std", s.rmse_std},
                      {"u_mean", s.u_mean},
                      {"u_std", s.u_std}});
  return {{"format", "hfm-uvalue-report"},
          {"version", 1},
          {"samples", report.samples},
          {"measured_u_full", estimate_json(report.measured_full)},
          {"cells", cells},
          {"spread", spread}};
}

UValueReport report_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "hfm-uvalue-report" || j.at("version").get<int>() != 1)
      throw Error(ErrorCode::FormatError, "not a version 1 U-value report");
    UValueReport r;
    r.samples = j.at("samples").get<std::size_t>();
    r.measured_full = estimate_from(j.at("measured_u_full"));
    for (const auto& jc : j.at("cells")) {
      CellResult c;
      c.architecture = jc.at("architecture").get<std::string>();
      c.split = SplitSpec::parse(jc.at("split").get<std::string>());
      c.global_seed = jc.at("global_seed").get<std::uint64_t>();
      c.seed = jc.at("seed").get<std::uint64_t>();
      c.ok = jc.at("ok").get<bool>();
      if (!c.ok) {
        c.error = parse_code(jc.value("error", std::string()));
        c.error_message = jc.value("error_message", std::string());
      } else {
        const auto& m = jc.at("metrics");
        c.metrics = {m.at("rmse").get<double>(), m.at("mse").get<double>(),
                     m.at("mae").get<double>()};
        c.predicted_validation = estimate_from(jc.at("predicted_u_validation"));
        c.predicted_full = estimate_from(jc.at("predicted_u_full"));
        c.measured_validation = estimate_from(jc.at("measured_u_validation"));
        c.relative_difference = jc.at("relative_difference").get<double>();
        c.best_in_split = jc.at("best_in_split").get<bool>();
        c.epochs = jc.at("epochs").get<std::size_t>();
        c.best_loss = jc.at("best_loss").get<double>();
      }
      r.cells.push_back(std::move(c));
    }
    for (const auto& js : j.at("spread"))
      r.spread.push_back({js.at("architecture").get<std::string>(),
                          SplitSpec::parse(js.at("split").get<std::string>()),
                          js.at("successful").get<std::size_t>(), js.at("rmse_mean").get<double>(),
                          js.at("rmse_std").get<double>(), js.at("u_mean").get<double>(),
                          js.at("u_std").get<double>()});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("malformed report: ") + e.what());
  }
}

nlohmann::json to_json(const ExtrapolationReport& report) {
  nlohmann::json intervals = nlohmann::json::array();
  for (const auto& iv : report.intervals) {
    nlohmann::json channels = nlohmann::json::array();
    if (iv.internal) channels.push_back("t_internal");
    if (iv.external) channels.push_back("t_external");
    intervals.push_back({{"first_index", iv.first},
                         {"last_index", iv.last},
                         {"first_timestamp", format_timestamp(iv.first_time)},
                         {"last_timestamp", format_timestamp(iv.last_time)},
                         {"channels", channels}});
  }
  return {{"validation_start", report.validation_start},
          {"validation_steps", report.flags.size()},
          {"flagged_steps", report.flagged_count()},
          {"intervals", intervals}};
}

// -- plot data ----------------------------------------------------------------------

void export_plot_data(std::span<const double> predicted, const MeasurementSeries& series,
                      SplitSpec split, const std::filesystem::path& prefix) {
  if (predicted.size() != series.size())
    throw Error(ErrorCode::LengthMismatch, "prediction length does not match the series");
  const std::size_t boundary = hfm::split(series, split).train.size();
  std::string lines = "timestamp,measured_q_w_m2,predicted_q_w_m2,segment,split_marker\n";
  std::string scatter = "measured_q_w_m2,predicted_q_w_m2,segment\n";
  for (std::size_t t = 0; t < series.size(); ++t) {
    const char* segment = t < boundary ? "train" : "validation";
    lines += format_timestamp(series[t].timestamp) + "," + format_double(series[t].heat_flux) +
             "," + format_double(predicted[t]) + "," + segment + "," +
             (t == boundary ? "1" : "0") + "\n";
    scatter += format_double(series[t].heat_flux) + "," + format_double(predicted[t]) + "," +
               segment + "\n";
  }
  const auto dir = prefix.parent_path();
  if (!dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  }
  write_text_file(prefix.string() + "_series.csv", lines);
  write_text_file(prefix.string() + "_scatter.csv", scatter);
}

void export_plot_data(const TrainingRun& run, const MeasurementSeries& series, SplitSpec split,
                      const std::filesystem::path& prefix) {
  export_plot_data(predict(run, series), series, split, prefix);
}

std::vector<PlotRow> read_plot_series(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "timestamp,measured_q_w_m2,predicted_q_w_m2,segment,split_marker")
    throw Error(ErrorCode::FormatError, path.string() + ": unexpected header");
  std::vector<PlotRow> rows;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    PlotRow r;
    if (f.size() != 5 || !parse_double(f[1], r.measured) || !parse_double(f[2], r.predicted))
      throw Error(ErrorCode::FormatError, path.string() + ": bad row", row);
    r.timestamp = parse_timestamp(f[0]);
    r.validation = f[3] == "validation";
    r.split_marker = f[4] == "1";
    rows.push_back(r);
  }
  return rows;
}

namespace {

std::string cell_stem(const CellResult& c) {
  std::string split = c.split.label();
  std::replace(split.begin(), split.end(), '/', '-');
  return upper(c.architecture) + "_" + split + "_s" + std::to_string(c.global_seed);
}

}  // namespace

void write_grid_outputs(const GridResult& grid, const MeasurementSeries& series,
                        const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "plots", ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  write_text_file(dir / "report.txt", format_table(grid.report));
  write_text_file(dir / "report.json", to_json(grid.report).dump(1) + "\n");
  nlohmann::json extrapolation = nlohmann::json::array();
  for (std::size_t i = 0; i < grid.report.cells.size(); ++i) {
    const auto& c = grid.report.cells[i];
    if (!c.ok) continue;
    export_plot_data(grid.predictions[i], series, c.split, dir / "plots" / cell_stem(c));
    nlohmann::json e = to_json(*grid.extrapolation[i]);
    e["architecture"] = c.architecture;
    e["split"] = c.split.label();
    e["global_seed"] = c.global_seed;
    extrapolation.push_back(std::move(e));
  }
  write_text_file(dir / "extrapolation.json", extrapolation.dump(1) + "\n");
}

}  // namespace hfm::experiment
