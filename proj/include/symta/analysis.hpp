#pragma once

#include "symta/engine.hpp"
#include "symta/expr.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace symta {

/// `name = value` per line, `#` comments. Values are exact rationals
/// (integers, fractions, decimals). Throws ParseError or InvalidSymbol.
NumericBindings parse_binding(std::string_view text);
NumericBindings load_binding(const std::filesystem::path &path);

struct OrderViolation {
  std::size_t earlier = 0;
  std::size_t later = 0;
  Value earlier_time;
  Value later_time;
  bool tie = false;
};

struct ValidityWarning {
  std::size_t step = 0;
  std::size_t gate = 0;
  std::size_t event = 0;
  Value delay;
  std::string message;
};

struct ConsistencyReport {
  bool consistent = true;
  std::optional<OrderViolation> first_violation;
  std::vector<ValidityWarning> warnings;
  std::vector<Value> times;
};

struct CheckOptions {
  /// Reject bindings that give a gate parameter or opaque delay a value <= 0.
  bool strict_physical = false;
};

/// Evaluates every event time exactly and checks that times strictly
/// increase in schedule order. Every instantiated gate-step delay <= 0 is
/// reported as a validity warning. Throws UnboundSymbol, ValidationError
/// (strict physical), DivisionByZero, DomainError.
ConsistencyReport check_consistency(const TimingSolution &solution,
                                    const NumericBindings &binding,
                                    const CheckOptions &options = {});

/// d time(event) / d wrt, canonical. Throws UnknownEvent, or UnknownSymbol
/// when `wrt` appears nowhere in the solution.
Expr sensitivity(const TimingSolution &solution, std::size_t event, std::string_view wrt);

struct OrderingConstraint {
  std::size_t earlier = 0;
  std::size_t later = 0;
  /// Must be > 0 for the ordering to hold.
  Expr difference;
};

/// time(e[k+1]) - time(e[k]) > 0 for every consecutive pair. Symbols not in
/// `free` are replaced by their value in `fixed` when present; an empty
/// `free` list keeps every symbol symbolic.
std::vector<OrderingConstraint>
solve_ordering_region(const TimingSolution &solution,
                      const std::vector<std::string> &free = {},
                      const NumericBindings &fixed = {});

/// SMT-LIB2 term for an expression. Throws UnsupportedOperator on exp/ln.
std::string to_smt(const Expr &e);

/// QF_NRA script: one declare-const per symbol, one `(assert (> e 0))` per
/// constraint, optional `(assert (= s v))` per fixed value, then
/// `(check-sat)`. Symbols of the constraints are declared even when not
/// listed. Throws UnsupportedOperator.
std::string export_smt(const std::vector<Expr> &positive,
                       const std::vector<std::string> &declarations = {},
                       const NumericBindings &fixed = {});
std::string export_smt(const std::vector<OrderingConstraint> &constraints,
                       const std::vector<std::string> &declarations = {},
                       const NumericBindings &fixed = {});

struct SweepRow {
  Rational value;
  Value result;
};

/// Exact evaluation of `e` at every grid point with `wrt` bound to it.
/// Throws UnboundSymbol when `base` misses another symbol.
std::vector<SweepRow> sweep(const Expr &e, std::string_view wrt,
                            const std::vector<Rational> &grid,
                            const NumericBindings &base);
std::vector<SweepRow> sweep(const TimingSolution &solution, std::size_t event,
                            std::string_view wrt, const std::vector<Rational> &grid,
                            const NumericBindings &base);

/// `value,time` header then one row per grid point.
std::string sweep_csv(const std::vector<SweepRow> &rows);

/// Comma-separated rationals, or `lo:hi:n` for n evenly spaced points.
std::vector<Rational> parse_grid(std::string_view text);

} // namespace symta
