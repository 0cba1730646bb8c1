#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "hfm/series.hpp"
#include "hfm/synth.hpp"

namespace hfm::testing {

inline Timestamp t0() { return parse_timestamp("2019-02-22T14:00:00Z"); }

/// Series whose k-th sample is f(k) -> {t_internal, t_external, heat_flux}.
template <typename F>
MeasurementSeries make_series(std::size_t n, F f, std::chrono::seconds step = std::chrono::seconds(600)) {
  std::vector<Sample> samples;
  for (std::size_t k = 0; k < n; ++k) {
    const auto [ti, te, q] = f(k);
    samples.push_back({t0() + step * static_cast<long long>(k), ti, te, q});
  }
  return MeasurementSeries(std::move(samples), step);
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

inline std::string preset(const std::string& name) { return std::string(HFM_PRESET_DIR) + "/" + name; }

}  // namespace hfm::testing
