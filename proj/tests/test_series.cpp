#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "hfm/error.hpp"
#include "hfm/series.hpp"
#include "support.hpp"

using namespace hfm;
using hfm::testing::make_series;

namespace {

const char* kHeader = "timestamp,t_internal_c,t_external_c,heat_flux_w_m2\n";

ErrorCode code_of(const std::string& text, std::optional<std::size_t>* row = nullptr) {
  try {
    parse_csv_text(text);
  } catch (const Error& e) {
    if (row) *row = e.row();
    return e.code();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return ErrorCode::FormatError;
}

std::string rows_csv(std::size_t n, long step_s = 600) {
  std::string text = kHeader;
  const auto start = hfm::testing::t0();
  for (std::size_t k = 0; k < n; ++k)
    text += format_timestamp(start + std::chrono::seconds(step_s * long(k))) + ",20.5,3.25,9.75\n";
  return text;
}

}  // namespace

TEST(ParseCsv, ThreeWellFormedRows) {
  const auto s = parse_csv_text(std::string(kHeader) +
                                "2019-02-22T14:00:00Z,20.1,4.0,9.5\n"
                                "2019-02-22T14:10:00Z,20.2,4.1,9.4\n"
                                "2019-02-22T14:20:00Z,20.3,4.2,9.3\n");
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.step(), std::chrono::seconds(600));
  EXPECT_DOUBLE_EQ(s[1].t_internal, 20.2);
  EXPECT_DOUBLE_EQ(s[2].t_external, 4.2);
  EXPECT_DOUBLE_EQ(s[0].heat_flux, 9.5);
  EXPECT_EQ(format_timestamp(s[2].timestamp), "2019-02-22T14:20:00Z");
}

TEST(ParseCsv, DuplicatedTimestampIsNonMonotonicAtRow2) {
  std::optional<std::size_t> row;
  const auto code = code_of(std::string(kHeader) +
                                "2019-02-22T14:00:00Z,20,4,9\n"
                                "2019-02-22T14:00:00Z,20,4,9\n"
                                "2019-02-22T14:10:00Z,20,4,9\n",
                            &row);
  EXPECT_EQ(code, ErrorCode::NonMonotonicTimestamp);
  EXPECT_EQ(row, 2u);
}

TEST(ParseCsv, FourHundredNinetyRowsSpan81AndAHalfHours) {
  const auto s = parse_csv_text(rows_csv(490));
  EXPECT_EQ(s.size(), 490u);
  EXPECT_EQ(s.span(), std::chrono::seconds(489 * 600));
  using hours_d = std::chrono::duration<double, std::ratio<3600>>;
  EXPECT_DOUBLE_EQ(hours_d(s.span()).count(), 81.5);
}

TEST(ParseCsv, AcceptsOtherConstantSteps) {
  const auto s = parse_csv_text(rows_csv(5, 300));
  EXPECT_EQ(s.step(), std::chrono::seconds(300));
}

TEST(ParseCsv, IrregularStepReportsRow) {
  std::optional<std::size_t> row;
  EXPECT_EQ(code_of(std::string(kHeader) +
                        "2019-02-22T14:00:00Z,20,4,9\n"
                        "2019-02-22T14:10:00Z,20,4,9\n"
                        "2019-02-22T14:25:00Z,20,4,9\n",
                    &row),
            ErrorCode::IrregularStep);
  EXPECT_EQ(row, 3u);
}

TEST(ParseCsv, Rejections) {
  EXPECT_EQ(code_of("timestamp,t_internal_c,t_external_c\n2019-02-22T14:00:00Z,1,2\n"),
            ErrorCode::MissingColumn);
  EXPECT_EQ(code_of("time,t_internal_c,t_external_c,heat_flux_w_m2\n"), ErrorCode::MissingColumn);
  std::optional<std::size_t> row;
  EXPECT_EQ(code_of(std::string(kHeader) +
                        "2019-02-22T14:00:00Z,20,4,9\n"
                        "2019-02-22T14:10:00Z,20,abc,9\n",
                    &row),
            ErrorCode::UnparsableValue);
  EXPECT_EQ(row, 2u);
  EXPECT_EQ(code_of(std::string(kHeader) +
                    "2019-02-22T14:00:00Z,20,4,9\n"
                    "2019-02-22T14:10:00Z,20,4,nan\n"),
            ErrorCode::NonFiniteValue);
  EXPECT_EQ(code_of(std::string(kHeader) + "2019-02-22T14:00:00Z,20,4,9\n"),
            ErrorCode::SeriesTooShort);
  EXPECT_EQ(code_of(std::string(kHeader) +
                    "2019-02-22 14:00,20,4,9\n"
                    "2019-02-22T14:10:00Z,20,4,9\n"),
            ErrorCode::UnparsableValue);
}

TEST(ParseCsv, MissingFileIsIoError) {
  try {
    parse_csv("/nonexistent/series.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
    EXPECT_EQ(exit_code(e.code()), 3);
  }
}

TEST(ParseCsv, TimezoneOffsetsNormaliseToUtc) {
  EXPECT_EQ(parse_timestamp("2019-02-22T15:00:00+01:00"), parse_timestamp("2019-02-22T14:00:00Z"));
  EXPECT_EQ(parse_timestamp("2019-02-22T09:30:00-04:30"), parse_timestamp("2019-02-22T14:00:00Z"));
}

TEST(Split, FloorRuleCounts) {
  const auto s = parse_csv_text(rows_csv(490));
  auto half = split(s, SplitSpec::parse("1/2"));
  EXPECT_EQ(half.train.size(), 245u);
  EXPECT_EQ(half.validation.size(), 245u);
  auto quarter = split(s, SplitSpec::parse("1/4"));
  EXPECT_EQ(quarter.train.size(), 122u);
  EXPECT_EQ(quarter.validation.size(), 368u);
  auto two_thirds = split(s, SplitSpec::parse("2/3"));
  EXPECT_EQ(two_thirds.train.size(), 326u);
  EXPECT_EQ(two_thirds.validation.size(), 164u);
}

TEST(Split, TooSmall) {
  const auto s = parse_csv_text(rows_csv(3));
  try {
    split(s, SplitSpec(1, 4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SplitTooSmall);
  }
}

TEST(Split, InvalidRatios) {
  for (const char* text : {"0/2", "2/2", "3/2", "1/0", "half", "1/", "/2"}) {
    try {
      SplitSpec::parse(text);
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidSplit) << text;
    }
  }
  EXPECT_EQ(SplitSpec::parse("2/4"), SplitSpec(1, 2));
}

TEST(Split, ConcatenationRestoresSeries) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 4 + gen() % 200;
    std::normal_distribution<double> d(0.0, 5.0);
    const auto s = make_series(n, [&](std::size_t) {
      return std::tuple{20 + d(gen), 5 + d(gen), d(gen)};
    });
    const std::uint32_t den = 2 + gen() % 6;
    const SplitSpec spec(1 + gen() % (den - 1), den);
    const std::size_t k = n * spec.numerator / spec.denominator;
    if (k < 2 || n - k < 2) continue;
    const auto parts = split(s, spec);
    std::vector<Sample> joined(parts.train.samples().begin(), parts.train.samples().end());
    joined.insert(joined.end(), parts.validation.samples().begin(), parts.validation.samples().end());
    EXPECT_TRUE(std::equal(joined.begin(), joined.end(), s.samples().begin(), s.samples().end()));
  }
}

TEST(CsvRoundTrip, RandomSeriesSurviveSerialisation) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + gen() % 50;
    const auto s = make_series(
        n, [&](std::size_t) { return std::tuple{u(gen), u(gen), u(gen) * 1e-3}; },
        std::chrono::seconds(60 * (1 + gen() % 30)));
    const auto back = parse_csv_text(to_csv(s));
    ASSERT_EQ(back.size(), s.size());
    EXPECT_EQ(back.step(), s.step());
    EXPECT_TRUE(std::equal(back.samples().begin(), back.samples().end(), s.samples().begin()));
  }
}

TEST(CsvRoundTrip, ThroughFile) {
  const auto s = parse_csv_text(rows_csv(10));
  const auto path = std::filesystem::temp_directory_path() / "hfm_series_roundtrip.csv";
  write_csv(s, path);
  const auto back = parse_csv(path);
  EXPECT_TRUE(std::equal(back.samples().begin(), back.samples().end(), s.samples().begin()));
  std::filesystem::remove(path);
}
