#include "hfm/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "hfm/error.hpp"

namespace hfm {

namespace {

void validate(const std::vector<Sample>& samples, std::chrono::seconds step) {
  if (samples.size() < 2)
    throw Error(ErrorCode::SeriesTooShort,
                "need at least 2 samples, got " + std::to_string(samples.size()));
  if (step.count() <= 0)
    throw Error(ErrorCode::IrregularStep, "step must be positive");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    if (!std::isfinite(s.t_internal) || !std::isfinite(s.t_external) ||
        !std::isfinite(s.heat_flux))
      throw Error(ErrorCode::NonFiniteValue, "non-finite value", i + 1);
    if (i == 0) continue;
    const auto dt = s.timestamp - samples[i - 1].timestamp;
    if (dt.count() <= 0)
      throw Error(ErrorCode::NonMonotonicTimestamp,
                  "timestamp " + format_timestamp(s.timestamp) +
                      " does not follow " + format_timestamp(samples[i - 1].timestamp),
                  i + 1);
    if (dt != step)
      throw Error(ErrorCode::IrregularStep,
                  "interval " + std::to_string(dt.count()) + " s, expected " +
                      std::to_string(step.count()) + " s",
                  i + 1);
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_int(std::string_view s, int& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

}  // namespace

// -- MeasurementSeries --------------------------------------------------------

MeasurementSeries::MeasurementSeries(std::vector<Sample> samples, std::chrono::seconds step)
    : samples_(std::move(samples)), step_(step) {
  validate(samples_, step_);
}

MeasurementSeries MeasurementSeries::from_samples(std::vector<Sample> samples) {
  if (samples.size() < 2)
    throw Error(ErrorCode::SeriesTooShort,
                "need at least 2 samples, got " + std::to_string(samples.size()));
  const auto step = samples[1].timestamp - samples[0].timestamp;
  if (step.count() <= 0)
    throw Error(ErrorCode::NonMonotonicTimestamp, "timestamps not increasing", 2);
  return MeasurementSeries(std::move(samples), std::chrono::seconds(step));
}

std::chrono::seconds MeasurementSeries::span() const noexcept {
  return samples_.back().timestamp - samples_.front().timestamp;
}

MeasurementSeries MeasurementSeries::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > samples_.size())
    throw Error(ErrorCode::DimensionMismatch, "slice out of range");
  return MeasurementSeries(
      std::vector<Sample>(samples_.begin() + static_cast<std::ptrdiff_t>(begin),
                          samples_.begin() + static_cast<std::ptrdiff_t>(end)),
      step_);
}

std::vector<double> MeasurementSeries::internal_temperatures() const {
  std::vector<double> out(samples_.size());
  std::transform(samples_.begin(), samples_.end(), out.begin(),
                 [](const Sample& s) { return s.t_internal; });
  return out;
}

std::vector<double> MeasurementSeries::external_temperatures() const {
  std::vector<double> out(samples_.size());
  std::transform(samples_.begin(), samples_.end(), out.begin(),
                 [](const Sample& s) { return s.t_external; });
  return out;
}

std::vector<double> MeasurementSeries::heat_fluxes() const {
  std::vector<double> out(samples_.size());
  std::transform(samples_.begin(), samples_.end(), out.begin(),
                 [](const Sample& s) { return s.heat_flux; });
  return out;
}

// -- SplitSpec ----------------------------------------------------------------

SplitSpec::SplitSpec(std::uint32_t num, std::uint32_t den) : numerator(num), denominator(den) {
  if (den == 0 || num == 0 || num >= den)
    throw Error(ErrorCode::InvalidSplit,
                "train fraction must lie in (0,1), got " + std::to_string(num) + "/" +
                    std::to_string(den));
  const auto g = std::gcd(num, den);
  numerator = num / g;
  denominator = den / g;
}

SplitSpec SplitSpec::parse(std::string_view text) {
  text = trim(text);
  const auto slash = text.find('/');
  int num = 0;
  int den = 0;
  if (slash == std::string_view::npos || !parse_int(text.substr(0, slash), num) ||
      !parse_int(text.substr(slash + 1), den) || num <= 0 || den <= 0)
    throw Error(ErrorCode::InvalidSplit, "expected a ratio like 1/2, got '" +
                                             std::string(text) + "'");
  return SplitSpec(static_cast<std::uint32_t>(num), static_cast<std::uint32_t>(den));
}

std::size_t SplitSpec::train_count(std::size_t n) const noexcept {
  return static_cast<std::size_t>(static_cast<std::uint64_t>(n) * numerator / denominator);
}

std::string SplitSpec::label() const {
  return std::to_string(numerator) + "/" + std::to_string(denominator);
}

SplitSeries split(const MeasurementSeries& series, SplitSpec spec) {
  const std::size_t n = series.size();
  const std::size_t n_train = spec.train_count(n);
  if (n_train < 2 || n - n_train < 2)
    throw Error(ErrorCode::SplitTooSmall,
                "split " + spec.label() + " of " + std::to_string(n) + " samples gives " +
                    std::to_string(n_train) + " train / " + std::to_string(n - n_train) +
                    " validation");
  return SplitSeries{series.slice(0, n_train), series.slice(n_train, n)};
}

// -- timestamps & numbers -----------------------------------------------------

Timestamp parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  const std::string_view original = text;
  auto fail = [&]() -> Timestamp {
    throw Error(ErrorCode::UnparsableValue, "bad timestamp '" + std::string(original) + "'");
  };
  // YYYY-MM-DDTHH:MM:SS then Z | ±HH:MM
  if (text.size() < 19 || text[4] != '-' || text[7] != '-' ||
      (text[10] != 'T' && text[10] != ' ') || text[13] != ':' || text[16] != ':')
    return fail();
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), mo) ||
      !parse_int(text.substr(8, 2), d) || !parse_int(text.substr(11, 2), h) ||
      !parse_int(text.substr(14, 2), mi) || !parse_int(text.substr(17, 2), s))
    return fail();
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60 || h < 0 || mi < 0 || s < 0) return fail();
  text.remove_prefix(19);
  seconds offset{0};
  if (text == "Z" || text == "z") {
  } else if (text.size() == 6 && (text[0] == '+' || text[0] == '-') && text[3] == ':') {
    int oh = 0, om = 0;
    if (!parse_int(text.substr(1, 2), oh) || !parse_int(text.substr(4, 2), om)) return fail();
    offset = hours{oh} + minutes{om};
    if (text[0] == '-') offset = -offset;
  } else {
    return fail();
  }
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} - offset;
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto days = floor<std::chrono::days>(t);
  const year_month_day ymd{days};
  const hh_mm_ss hms{t - days};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()), int(hms.hours().count()),
                int(hms.minutes().count()), int(hms.seconds().count()));
  return buf;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

bool parse_double(std::string_view text, double& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out, std::chars_format::general);
  return ec == std::errc{} && ptr == end && !text.empty();
}

// -- CSV ----------------------------------------------------------------------

MeasurementSeries parse_csv_text(std::string_view text) {
  std::vector<Sample> samples;
  std::size_t pos = 0;
  bool header_seen = false;
  std::size_t row = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    if (!header_seen) {
      if (line.size() >= 3 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
      if (line.empty()) continue;
      const auto fields = split_fields(line);
      static constexpr std::string_view kNames[] = {"timestamp", "t_internal_c",
                                                    "t_external_c", "heat_flux_w_m2"};
      for (std::size_t i = 0; i < 4; ++i) {
        if (i >= fields.size() || fields[i] != kNames[i])
          throw Error(ErrorCode::MissingColumn,
                      "expected header '" + std::string(kCsvHeader) + "', column " +
                          std::to_string(i + 1) + " should be '" + std::string(kNames[i]) + "'");
      }
      if (fields.size() != 4)
        throw Error(ErrorCode::MissingColumn,
                    "unexpected extra columns; expected '" + std::string(kCsvHeader) + "'");
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    ++row;
    const auto fields = split_fields(line);
    if (fields.size() != 4)
      throw Error(ErrorCode::MissingColumn,
                  "expected 4 fields, got " + std::to_string(fields.size()), row);
    Sample s;
    s.timestamp = [&] {
      try {
        return parse_timestamp(fields[0]);
      } catch (const Error& e) {
        throw Error(ErrorCode::UnparsableValue, e.what(), row);
      }
    }();
    double* targets[] = {&s.t_internal, &s.t_external, &s.heat_flux};
    for (std::size_t i = 0; i < 3; ++i) {
      if (!parse_double(fields[i + 1], *targets[i]))
        throw Error(ErrorCode::UnparsableValue,
                    "cannot parse '" + std::string(fields[i + 1]) + "' as a number", row);
    }
    samples.push_back(s);
  }
  if (!header_seen) throw Error(ErrorCode::MissingColumn, "empty file, no header");
  if (samples.size() < 2)
    throw Error(ErrorCode::SeriesTooShort,
                "need at least 2 samples, got " + std::to_string(samples.size()));
  const auto step = samples[1].timestamp - samples[0].timestamp;
  if (step.count() <= 0)
    throw Error(ErrorCode::NonMonotonicTimestamp, "timestamp does not increase", 2);
  return MeasurementSeries(std::move(samples), std::chrono::seconds(step));
}

MeasurementSeries parse_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv_text(buf.str());
}

std::string to_csv(const MeasurementSeries& series) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const Sample& s : series.samples()) {
    out += format_timestamp(s.timestamp);
    out += ',';
    out += format_double(s.t_internal);
    out += ',';
    out += format_double(s.t_external);
    out += ',';
    out += format_double(s.heat_flux);
    out += '\n';
  }
  return out;
}

void write_csv(const MeasurementSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << to_csv(series);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace hfm
