#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gapcavity {

enum class ErrorKind {
    InvalidArgument,
    NoGuidedMode,
    GridTooSmall,
    ZeroField,
    InsufficientSamples,
    NegativeDistance,
    GridMismatch,
    InvalidIndex,
    SeriesNotConverged,
    OutOfRange,
    NoSolution,
    InsufficientData,
    FitDiverged,
    RankDeficient,
    Config,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NoGuidedMode: return "NoGuidedMode";
    case ErrorKind::GridTooSmall: return "GridTooSmall";
    case ErrorKind::ZeroField: return "ZeroField";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::NegativeDistance: return "NegativeDistance";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::InvalidIndex: return "InvalidIndex";
    case ErrorKind::SeriesNotConverged: return "SeriesNotConverged";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::NoSolution: return "NoSolution";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::FitDiverged: return "FitDiverged";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::Config: return "Config";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a kind so front ends can map
/// it to an exit status without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
    {
    }

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what)
{
    throw Error(kind, what);
}

inline void require(bool condition, ErrorKind kind, const std::string& what)
{
    if (!condition) fail(kind, what);
}

} // namespace gapcavity
