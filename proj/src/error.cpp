#include "symta/error.hpp"

namespace symta {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::ParseError: return "ParseError";
  case ErrorKind::ZeroDenominator: return "ZeroDenominator";
  case ErrorKind::InvalidSymbol: return "InvalidSymbol";
  case ErrorKind::UnboundSymbol: return "UnboundSymbol";
  case ErrorKind::DivisionByZero: return "DivisionByZero";
  case ErrorKind::DomainError: return "DomainError";
  case ErrorKind::UnknownGateType: return "UnknownGateType";
  case ErrorKind::MissingParameter: return "MissingParameter";
  case ErrorKind::ValidationError: return "ValidationError";
  case ErrorKind::MultipleDrivers: return "MultipleDrivers";
  case ErrorKind::UndeclaredSignal: return "UndeclaredSignal";
  case ErrorKind::UnknownSignal: return "UnknownSignal";
  case ErrorKind::NonAlternatingDirections: return "NonAlternatingDirections";
  case ErrorKind::NoFeasibleCause: return "NoFeasibleCause";
  case ErrorKind::InconsistentInitialState: return "InconsistentInitialState";
  case ErrorKind::CausalityViolation: return "CausalityViolation";
  case ErrorKind::DirectionMismatch: return "DirectionMismatch";
  case ErrorKind::UnknownEvent: return "UnknownEvent";
  case ErrorKind::UnknownSymbol: return "UnknownSymbol";
  case ErrorKind::UnsupportedOperator: return "UnsupportedOperator";
  case ErrorKind::IoError: return "IoError";
  }
  return "Error";
}

namespace {

std::string decorate(ErrorKind kind, const std::string &message, int line) {
  std::string out(to_string(kind));
  if (line > 0)
    out += " (line " + std::to_string(line) + ")";
  out += ": ";
  out += message;
  return out;
}

} // namespace

Error::Error(ErrorKind kind, const std::string &message, std::string subject,
             int line)
    : std::runtime_error(decorate(kind, message, line)), kind_(kind),
      subject_(std::move(subject)), line_(line) {}

} // namespace symta
