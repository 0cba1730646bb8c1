#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hfm {

enum class ErrorCode {
  // data
  MissingColumn,
  NonMonotonicTimestamp,
  IrregularStep,
  UnparsableValue,
  NonFiniteValue,
  SeriesTooShort,
  InvalidSplit,
  SplitTooSmall,
  DegenerateTemperatureDifference,
  LengthMismatch,
  EmptyInput,
  ZeroReference,
  SpanTooShort,
  ConstantChannel,
  InvalidWall,
  InvalidScenario,
  UnstableConfiguration,
  InvalidConfig,
  // model
  DimensionMismatch,
  LayoutMismatch,
  UnknownArchitecture,
  InvalidNetwork,
  DivergedLoss,
  // io
  IoError,
  FormatError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Process exit status for a failure of the given kind:
/// 1 data error, 2 training divergence, 3 I/O error.
int exit_code(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> row = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  /// One-based data row (header excluded) the error refers to, if any.
  std::optional<std::size_t> row() const noexcept { return row_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> row_;
};

}  // namespace hfm
