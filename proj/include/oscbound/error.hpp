#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oscbound {

enum class ErrorCode {
    InvalidArgument,
    InvalidGrid,
    EmptyShape,
    InvalidShape,
    BadMagic,
    UnsupportedVersion,
    DimensionMismatch,
    TruncatedPayload,
    Io,
    NotCellEnumerable,
    NotACube,
    NotAFalseCube,
    NotInBasisA,
    NoAdmissibleSector,
    OutOfRange,
    LevelBelowBaseMean,
    SunBelowHorizon,
    NegativeValues,
    NoAdmissibleTiling,
    UnknownSuite,
};

std::string_view to_string(ErrorCode code);

// Every library failure carries a machine-checkable code next to the message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace oscbound
