#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace dinterp {

enum class ErrorCode {
  InvalidArgument,
  // grid1d
  ZeroMass,
  NegativeValue,
  WeightSum,
  PointMass,
  DomainMismatch,
  // dinterp1d
  BothPartsZero,
  DegenerateDenominator,
  UnsupportedSignPattern,
  MismatchedComponents,
  // lowrank
  AllIdentical,
  ConvergenceFailure,
  RankTooLarge,
  OutOfRange,
  EmptyInput,
  // radon / transform
  GeometryMismatch,
  NoConvergence,
  ShapeMismatch,
  OddDimension,
  // scenarios
  OutOfDomain,
  UnsupportedIC,
  // io
  ParseError,
  InvariantViolation,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every library failure is reported through this type; `code()` identifies
// the condition and `what()` carries the human-readable context.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  // The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

// The message is only materialized on failure, so string literals cost nothing.
template <class Message>
inline void require(bool condition, ErrorCode code, Message&& message) {
  if (!condition) fail(code, std::string(std::forward<Message>(message)));
}

}  // namespace dinterp
