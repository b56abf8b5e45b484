#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace intreg {

enum class ErrorCode {
    InvalidArgument,
    InvalidInterval,
    InvalidTau,
    NotHukuharaDecomposable,
    EmptySample,
    LengthMismatch,
    DimensionMismatch,
    DegenerateSample,
    DegenerateDesign,
    SingularQ,
    PivotLimitExceeded,
    RayTermination,
    InfeasibleQp,
    InfeasibleConstraints,
    FoldTooSmall,
    InvalidTruth,
    TooLarge,
    MalformedHeader,
    NonNumericCell,
    InvertedInterval,
    EmptyFile,
    IoError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidInterval: return "InvalidInterval";
    case ErrorCode::InvalidTau: return "InvalidTau";
    case ErrorCode::NotHukuharaDecomposable: return "NotHukuharaDecomposable";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::DegenerateDesign: return "DegenerateDesign";
    case ErrorCode::SingularQ: return "SingularQ";
    case ErrorCode::PivotLimitExceeded: return "PivotLimitExceeded";
    case ErrorCode::RayTermination: return "RayTermination";
    case ErrorCode::InfeasibleQp: return "InfeasibleQp";
    case ErrorCode::InfeasibleConstraints: return "InfeasibleConstraints";
    case ErrorCode::FoldTooSmall: return "FoldTooSmall";
    case ErrorCode::InvalidTruth: return "InvalidTruth";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::NonNumericCell: return "NonNumericCell";
    case ErrorCode::InvertedInterval: return "InvertedInterval";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

/// Every failure in the library is reported through this type. `code()` is
/// stable and meant for programmatic handling; `what()` carries detail.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message)
{
    throw Error(code, std::string(to_string(code)) + ": " + message);
}

} // namespace intreg
