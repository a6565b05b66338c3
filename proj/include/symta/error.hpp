#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace symta {

enum class ErrorKind {
  ParseError,
  ZeroDenominator,
  InvalidSymbol,
  UnboundSymbol,
  DivisionByZero,
  DomainError,
  UnknownGateType,
  MissingParameter,
  ValidationError,
  MultipleDrivers,
  UndeclaredSignal,
  UnknownSignal,
  NonAlternatingDirections,
  NoFeasibleCause,
  InconsistentInitialState,
  CausalityViolation,
  DirectionMismatch,
  UnknownEvent,
  UnknownSymbol,
  UnsupportedOperator,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure in the library is reported through this type. `subject()`
/// carries the offending name (symbol, signal, path) when there is one and
/// `line()` the 1-based source line for file parsers (0 when not applicable).
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &message, std::string subject = {},
        int line = 0);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string &subject() const noexcept { return subject_; }
  int line() const noexcept { return line_; }

private:
  ErrorKind kind_;
  std::string subject_;
  int line_;
};

} // namespace symta
