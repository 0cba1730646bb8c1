#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hfm {

using Timestamp = std::chrono::sys_seconds;

/// One heat-flux-method reading: air temperatures on both sides of the
/// element and the heat flux through it.
struct Sample {
  Timestamp timestamp;
  double t_internal = 0.0;  // °C
  double t_external = 0.0;  // °C
  double heat_flux = 0.0;   // W/m²

  double delta_t() const noexcept { return t_internal - t_external; }

  friend bool operator==(const Sample&, const Sample&) = default;
};

inline constexpr std::chrono::seconds kDefaultStep{600};

/// Uniformly sampled measurement record. Construction validates:
/// at least two samples, finite values, strictly increasing timestamps
/// spaced by exactly `step`.
class MeasurementSeries {
 public:
  MeasurementSeries(std::vector<Sample> samples, std::chrono::seconds step);

  /// Infers the step from the first interval.
  static MeasurementSeries from_samples(std::vector<Sample> samples);

  std::span<const Sample> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  std::chrono::seconds step() const noexcept { return step_; }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }
  const Sample& front() const { return samples_.front(); }
  const Sample& back() const { return samples_.back(); }

  /// Time between first and last sample, i.e. (N-1) steps.
  std::chrono::seconds span() const noexcept;

  /// Contiguous sub-range [begin, end). Must keep at least two samples.
  MeasurementSeries slice(std::size_t begin, std::size_t end) const;

  std::vector<double> internal_temperatures() const;
  std::vector<double> external_temperatures() const;
  std::vector<double> heat_fluxes() const;

  friend bool operator==(const MeasurementSeries&, const MeasurementSeries&) = default;

 private:
  std::vector<Sample> samples_;
  std::chrono::seconds step_;
};

/// Chronological train fraction, stored as a ratio so that the boundary
/// floor(n * f) is computed exactly.
struct SplitSpec {
  std::uint32_t numerator = 1;
  std::uint32_t denominator = 2;

  SplitSpec() = default;
  SplitSpec(std::uint32_t num, std::uint32_t den);

  /// Accepts "a/b".
  static SplitSpec parse(std::string_view text);

  std::size_t train_count(std::size_t n) const noexcept;
  double fraction() const noexcept { return double(numerator) / double(denominator); }
  std::string label() const;

  friend bool operator==(const SplitSpec&, const SplitSpec&) = default;
};

struct SplitSeries {
  MeasurementSeries train;
  MeasurementSeries validation;
};

/// First floor(f*N) samples train, the rest validate. No shuffling.
SplitSeries split(const MeasurementSeries& series, SplitSpec spec);

// -- CSV ---------------------------------------------------------------------

inline constexpr std::string_view kCsvHeader =
    "timestamp,t_internal_c,t_external_c,heat_flux_w_m2";

MeasurementSeries parse_csv(const std::filesystem::path& path);
MeasurementSeries parse_csv_text(std::string_view text);

std::string to_csv(const MeasurementSeries& series);
void write_csv(const MeasurementSeries& series, const std::filesystem::path& path);

/// ISO 8601 UTC, e.g. 2019-02-22T14:00:00Z. A numeric offset (+01:00) is
/// also accepted and folded into UTC.
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp t);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
bool parse_double(std::string_view text, double& out);

}  // namespace hfm
