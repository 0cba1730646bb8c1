#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hfm/architectures.hpp"
#include "hfm/error.hpp"
#include "hfm/iso9869.hpp"
#include "hfm/series.hpp"

namespace hfm::experiment {

// -- extrapolation --------------------------------------------------------------

struct ExtrapolationFlag {
  bool internal = false;  // T_i outside the training range
  bool external = false;  // T_e outside the training range
  bool any() const noexcept { return internal || external; }
  friend bool operator==(const ExtrapolationFlag&, const ExtrapolationFlag&) = default;
};

struct FlaggedInterval {
  std::size_t first = 0;  // series index, inclusive
  std::size_t last = 0;   // series index, inclusive
  Timestamp first_time;
  Timestamp last_time;
  bool internal = false;  // some step in the interval has T_i out of range
  bool external = false;
  friend bool operator==(const FlaggedInterval&, const FlaggedInterval&) = default;
};

struct ExtrapolationReport {
  std::size_t validation_start = 0;
  std::vector<ExtrapolationFlag> flags;  // one per validation step
  std::vector<FlaggedInterval> intervals;

  std::size_t flagged_count() const noexcept;
};

/// Flags validation steps whose normalized T_i or T_e leaves
/// [min - margin, max + margin] of the training segment. `margin` is in
/// normalized units; infinity disables flagging.
ExtrapolationReport detect_extrapolation(const TrainingRun& run, const MeasurementSeries& series,
                                         SplitSpec split, double margin = 0.0);

// -- grid -------------------------------------------------------------------------

/// Seed of one grid cell: mix64(FNV-1a("<global>|<ARCH>|<a/b>")), with the
/// architecture upper-cased. Independent of grid composition and order.
std::uint64_t cell_seed(std::uint64_t global_seed, std::string_view architecture, SplitSpec split);

struct CellResult {
  std::string architecture;
  SplitSpec split;
  std::uint64_t global_seed = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::optional<ErrorCode> error;
  std::string error_message;

  iso9869::MetricSet metrics;               // validation segment
  iso9869::UValueEstimate predicted_validation;
  iso9869::UValueEstimate predicted_full;
  iso9869::UValueEstimate measured_validation;
  double relative_difference = 0.0;         // predicted vs measured, validation segment
  bool best_in_split = false;
  std::size_t epochs = 0;
  double best_loss = 0.0;

  friend bool operator==(const CellResult&, const CellResult&) = default;
};

struct SpreadSummary {
  std::string architecture;
  SplitSpec split;
  std::size_t successful = 0;
  double rmse_mean = 0.0;
  double rmse_std = 0.0;
  double u_mean = 0.0;
  double u_std = 0.0;
  friend bool operator==(const SpreadSummary&, const SpreadSummary&) = default;
};

struct UValueReport {
  iso9869::UValueEstimate measured_full;
  std::size_t samples = 0;
  std::vector<CellResult> cells;      // architecture-major, then split, then seed
  std::vector<SpreadSummary> spread;  // only when more than one seed

  std::size_t best_marker_count() const noexcept;
  friend bool operator==(const UValueReport&, const UValueReport&) = default;
};

struct GridResult {
  UValueReport report;
  /// Parallel to report.cells; empty optionals for failed cells.
  std::vector<std::optional<TrainingRun>> runs;
  std::vector<std::vector<double>> predictions;
  std::vector<std::optional<ExtrapolationReport>> extrapolation;
};

GridResult run_grid(const MeasurementSeries& series, const std::vector<std::string>& architectures,
                    const std::vector<SplitSpec>& splits, const std::vector<std::uint64_t>& seeds,
                    const TrainConfig& config);

/// Marks argmin-RMSE among successful cells of each split.
void mark_best(UValueReport& report);

// -- report I/O ---------------------------------------------------------------------

/// Human-readable table: ANN type, train/validation, seed, RMSE, MSE, MAE,
/// predicted U, measured U, rel. difference, full-series predicted U, best.
std::string format_table(const UValueReport& report);

nlohmann::json to_json(const UValueReport& report);
UValueReport report_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExtrapolationReport& report);

// -- plot data ----------------------------------------------------------------------

struct PlotRow {
  Timestamp timestamp;
  double measured = 0.0;
  double predicted = 0.0;
  bool validation = false;
  bool split_marker = false;
};

/// Writes "<prefix>_series.csv" (timestamp, measured, predicted, segment,
/// split marker at index floor(f*N)) and "<prefix>_scatter.csv" (measured vs
/// predicted). Throws IoError.
void export_plot_data(std::span<const double> predicted, const MeasurementSeries& series,
                      SplitSpec split, const std::filesystem::path& prefix);
void export_plot_data(const TrainingRun& run, const MeasurementSeries& series, SplitSpec split,
                      const std::filesystem::path& prefix);

std::vector<PlotRow> read_plot_series(const std::filesystem::path& path);

/// Writes report.txt, report.json, extrapolation.json and plots/ into `dir`.
void write_grid_outputs(const GridResult& grid, const MeasurementSeries& series,
                        const std::filesystem::path& dir);

}  // namespace hfm::experiment
