#include "oscbound/error.hpp"

namespace oscbound {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::InvalidGrid: return "invalid grid";
    case ErrorCode::EmptyShape: return "empty shape";
    case ErrorCode::InvalidShape: return "invalid shape";
    case ErrorCode::BadMagic: return "bad magic";
    case ErrorCode::UnsupportedVersion: return "unsupported version";
    case ErrorCode::DimensionMismatch: return "dimension mismatch";
    case ErrorCode::TruncatedPayload: return "truncated payload";
    case ErrorCode::Io: return "i/o error";
    case ErrorCode::NotCellEnumerable: return "not cell-enumerable";
    case ErrorCode::NotACube: return "not a cube";
    case ErrorCode::NotAFalseCube: return "not a false cube";
    case ErrorCode::NotInBasisA: return "not in basis A";
    case ErrorCode::NoAdmissibleSector: return "no admissible sector";
    case ErrorCode::OutOfRange: return "out of range";
    case ErrorCode::LevelBelowBaseMean: return "level below base mean";
    case ErrorCode::SunBelowHorizon: return "sun below horizon";
    case ErrorCode::NegativeValues: return "negative values";
    case ErrorCode::NoAdmissibleTiling: return "no admissible tiling";
    case ErrorCode::UnknownSuite: return "unknown suite";
    }
    return "unknown error";
}

}  // namespace oscbound
