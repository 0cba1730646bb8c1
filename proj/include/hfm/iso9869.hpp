#pragma once

#include <chrono>
#include <cstddef>
#include <span>
#include <vector>

#include "hfm/series.hpp"

namespace hfm::iso9869 {

/// Average-method estimate U = sum(q_j) / sum((T_i - T_e)_j).
struct UValueEstimate {
  double u = 0.0;              // W/(m²K)
  std::size_t n_samples = 0;
  double mean_delta_t = 0.0;   // K
  /// Set when u < 0: flux sign disagrees with the temperature difference,
  /// usually a reversed sensor.
  bool reversed_flux = false;

  friend bool operator==(const UValueEstimate&, const UValueEstimate&) = default;
};

struct MetricSet {
  double rmse = 0.0;
  double mse = 0.0;
  double mae = 0.0;

  friend bool operator==(const MetricSet&, const MetricSet&) = default;
};

inline constexpr double kDefaultDenominatorEpsilon = 1e-9;

/// Neumaier-compensated running sum. Adding the same values in the same
/// order always yields the same bits.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

UValueEstimate average_u_value(const MeasurementSeries& series,
                               double denominator_epsilon = kDefaultDenominatorEpsilon);

/// Same ratio for raw arrays; used when q comes from a model rather than
/// the sensor.
UValueEstimate average_u_value(std::span<const double> heat_flux,
                               std::span<const double> delta_t,
                               double denominator_epsilon = kDefaultDenominatorEpsilon);

struct TracePoint {
  std::size_t end_index = 0;  // estimate covers samples [0, end_index]
  UValueEstimate estimate;
};

struct RunningTrace {
  std::vector<TracePoint> points;
  /// Prefixes whose temperature-difference sum was degenerate.
  std::vector<std::size_t> degenerate_indices;
};

RunningTrace running_u_trace(const MeasurementSeries& series,
                             double denominator_epsilon = kDefaultDenominatorEpsilon);

struct StabilityReport {
  bool stable = false;
  double span_hours = 0.0;
  bool span_ok = false;          // span >= 72 h
  double u_all = 0.0;
  double u_without_last_window = 0.0;
  double relative_change = 0.0;  // |U(all) - U(head)| / |U(all)|
  std::size_t head_samples = 0;
};

/// Simplified, non-normative convergence test: the series must span at
/// least 72 h, and dropping the final `window` may not move U by more than
/// `tol` relative. Throws SpanTooShort if the series spans less than
/// 3 * window.
StabilityReport stability_check(const MeasurementSeries& series,
                                std::chrono::seconds window = std::chrono::hours(24),
                                double tol = 0.05);

MetricSet metrics(std::span<const double> predicted, std::span<const double> actual);

/// |measured - predicted| / |measured|
double relative_difference(double predicted_u, double measured_u);

}  // namespace hfm::iso9869
