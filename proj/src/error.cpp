#include "dinterp/error.hpp"

namespace dinterp {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroMass: return "ZeroMass";
    case ErrorCode::NegativeValue: return "NegativeValue";
    case ErrorCode::WeightSum: return "WeightSum";
    case ErrorCode::PointMass: return "PointMass";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::BothPartsZero: return "BothPartsZero";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::UnsupportedSignPattern: return "UnsupportedSignPattern";
    case ErrorCode::MismatchedComponents: return "MismatchedComponents";
    case ErrorCode::AllIdentical: return "AllIdentical";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::RankTooLarge: return "RankTooLarge";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::GeometryMismatch: return "GeometryMismatch";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::OddDimension: return "OddDimension";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::UnsupportedIC: return "UnsupportedIC";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

}  // namespace dinterp
