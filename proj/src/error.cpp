#include "hfm/error.hpp"

namespace hfm {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::NonMonotonicTimestamp: return "NonMonotonicTimestamp";
    case ErrorCode::IrregularStep: return "IrregularStep";
    case ErrorCode::UnparsableValue: return "UnparsableValue";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::InvalidSplit: return "InvalidSplit";
    case ErrorCode::SplitTooSmall: return "SplitTooSmall";
    case ErrorCode::DegenerateTemperatureDifference: return "DegenerateTemperatureDifference";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ZeroReference: return "ZeroReference";
    case ErrorCode::SpanTooShort: return "SpanTooShort";
    case ErrorCode::ConstantChannel: return "ConstantChannel";
    case ErrorCode::InvalidWall: return "InvalidWall";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::UnstableConfiguration: return "UnstableConfiguration";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::LayoutMismatch: return "LayoutMismatch";
    case ErrorCode::UnknownArchitecture: return "UnknownArchitecture";
    case ErrorCode::InvalidNetwork: return "InvalidNetwork";
    case ErrorCode::DivergedLoss: return "DivergedLoss";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::FormatError: return "FormatError";
  }
  return "Unknown";
}

int exit_code(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DivergedLoss: return 2;
    case ErrorCode::IoError: return 3;
    default: return 1;
  }
}

namespace {
std::string decorate(ErrorCode code, const std::string& message,
                     std::optional<std::size_t> row) {
  std::string out(to_string(code));
  if (row) out += " (row " + std::to_string(*row) + ")";
  if (!message.empty()) out += ": " + message;
  return out;
}
}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> row)
    : std::runtime_error(decorate(code, message, row)), code_(code), row_(row) {}

}  // namespace hfm
