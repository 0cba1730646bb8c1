#include "hfm/iso9869.hpp"

#include <cmath>

#include "hfm/error.hpp"

namespace hfm::iso9869 {

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::fabs(sum_) >= std::fabs(x))
    compensation_ += (sum_ - t) + x;
  else
    compensation_ += (x - t) + sum_;
  sum_ = t;
}

namespace {

UValueEstimate make_estimate(double sum_q, double sum_dt, std::size_t n, double eps) {
  if (!(std::fabs(sum_dt) >= eps))
    throw Error(ErrorCode::DegenerateTemperatureDifference,
                "sum of temperature differences " + format_double(sum_dt) +
                    " K is below " + format_double(eps));
  UValueEstimate est;
  est.u = sum_q / sum_dt;
  est.n_samples = n;
  est.mean_delta_t = sum_dt / static_cast<double>(n);
  est.reversed_flux = est.u < 0.0;
  return est;
}

}  // namespace

UValueEstimate average_u_value(const MeasurementSeries& series, double eps) {
  CompensatedSum q;
  CompensatedSum dt;
  for (const Sample& s : series.samples()) {
    q.add(s.heat_flux);
    dt.add(s.delta_t());
  }
  return make_estimate(q.value(), dt.value(), series.size(), eps);
}

UValueEstimate average_u_value(std::span<const double> heat_flux,
                               std::span<const double> delta_t, double eps) {
  if (heat_flux.size() != delta_t.size())
    throw Error(ErrorCode::LengthMismatch, "heat flux and temperature difference lengths differ");
  if (heat_flux.empty()) throw Error(ErrorCode::EmptyInput, "no samples");
  CompensatedSum q;
  CompensatedSum dt;
  for (std::size_t j = 0; j < heat_flux.size(); ++j) {
    q.add(heat_flux[j]);
    dt.add(delta_t[j]);
  }
  return make_estimate(q.value(), dt.value(), heat_flux.size(), eps);
}

RunningTrace running_u_trace(const MeasurementSeries& series, double eps) {
  RunningTrace trace;
  CompensatedSum q;
  CompensatedSum dt;
  const auto samples = series.samples();
  for (std::size_t k = 0; k < samples.size(); ++k) {
    q.add(samples[k].heat_flux);
    dt.add(samples[k].delta_t());
    if (k == 0) continue;
    const double sum_dt = dt.value();
    if (!(std::fabs(sum_dt) >= eps)) {
      trace.degenerate_indices.push_back(k);
      continue;
    }
    trace.points.push_back({k, make_estimate(q.value(), sum_dt, k + 1, eps)});
  }
  return trace;
}

StabilityReport stability_check(const MeasurementSeries& series, std::chrono::seconds window,
                                double tol) {
  if (window.count() <= 0) throw Error(ErrorCode::InvalidConfig, "window must be positive");
  const auto span = series.span();
  if (span < 3 * window)
    throw Error(ErrorCode::SpanTooShort,
                "series spans " + format_double(span.count() / 3600.0) + " h, need " +
                    format_double(3 * window.count() / 3600.0) + " h");
  StabilityReport report;
  report.span_hours = span.count() / 3600.0;
  report.span_ok = span >= std::chrono::hours(72);

  const Timestamp cutoff = series.back().timestamp - window;
  std::size_t head = 0;
  while (head < series.size() && series[head].timestamp <= cutoff) ++head;
  report.head_samples = head;

  report.u_all = average_u_value(series).u;
  report.u_without_last_window = average_u_value(series.slice(0, head)).u;
  report.relative_change =
      std::fabs(report.u_all - report.u_without_last_window) / std::fabs(report.u_all);
  report.stable = report.span_ok && report.relative_change <= tol;
  return report;
}

MetricSet metrics(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size())
    throw Error(ErrorCode::LengthMismatch,
                "predicted has " + std::to_string(predicted.size()) + " values, actual has " +
                    std::to_string(actual.size()));
  if (predicted.empty()) throw Error(ErrorCode::EmptyInput, "no values to compare");
  CompensatedSum sq;
  CompensatedSum abs;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double e = predicted[i] - actual[i];
    sq.add(e * e);
    abs.add(std::fabs(e));
  }
  const double n = static_cast<double>(predicted.size());
  MetricSet m;
  m.mse = sq.value() / n;
  m.rmse = std::sqrt(m.mse);
  m.mae = abs.value() / n;
  return m;
}

double relative_difference(double predicted_u, double measured_u) {
  if (measured_u == 0.0)
    throw Error(ErrorCode::ZeroReference, "measured U-value is zero");
  return std::fabs(measured_u - predicted_u) / std::fabs(measured_u);
}

}  // namespace hfm::iso9869
