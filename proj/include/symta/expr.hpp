#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace symta {

using Rational = mpq_class;

enum class ExprKind : std::uint8_t {
  Constant,
  Symbol,
  Power,
  Product,
  Sum,
  Exp,
  Ln,
};

class Expr;

namespace detail {
struct ExprNode;
}

/// Immutable, canonical symbolic expression.
///
/// Every factory returns the canonical form, so two expressions are
/// mathematically identical under the rewrite rules below iff they compare
/// equal with `==`:
///   - sums and products are flattened and their operands sorted by
///     `compare` (constants first, then symbols by name);
///   - numeric constants are folded, like terms (c1*m + c2*m) and like
///     factors (b^n * b^m) are combined, zero terms and unit factors vanish;
///   - a numeric coefficient times a single sum is distributed;
///   - powers of products distribute, powers of powers multiply exponents.
/// No polynomial GCD cancellation and no exp/ln identities are applied.
///
/// Copies share the underlying node; an Expr can be passed freely between
/// threads.
class Expr {
public:
  /// The constant 0.
  Expr();

  static Expr constant(const Rational &value);
  static Expr integer(long value);
  /// Throws ZeroDenominator when `den == 0`.
  static Expr rational(long num, long den);
  /// Throws InvalidSymbol unless the name matches [A-Za-z_][A-Za-z0-9_]*.
  static Expr symbol(std::string_view name);

  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);
  /// Throws ZeroDenominator for a zero constant raised to a negative power.
  static Expr power(const Expr &base, long exponent);
  static Expr exp(const Expr &arg);
  static Expr ln(const Expr &arg);

  ExprKind kind() const noexcept;
  bool is_constant() const noexcept { return kind() == ExprKind::Constant; }
  bool is_symbol() const noexcept { return kind() == ExprKind::Symbol; }
  bool is_zero() const noexcept;
  bool is_one() const noexcept;

  /// Constant value; only valid for ExprKind::Constant.
  const Rational &value() const;
  /// Symbol name; only valid for ExprKind::Symbol.
  const std::string &name() const;
  /// Sum terms, product factors, {base} for powers, {arg} for exp/ln.
  std::span<const Expr> operands() const noexcept;
  const Expr &base() const;
  long exponent() const;
  const Expr &argument() const;

  std::size_t hash() const noexcept;
  /// Stable identity of the shared node, for memoization keyed on sharing.
  const void *id() const noexcept { return node_.get(); }

  friend bool operator==(const Expr &lhs, const Expr &rhs);

private:
  explicit Expr(std::shared_ptr<const detail::ExprNode> node)
      : node_(std::move(node)) {}
  friend struct detail::ExprNode;
  friend class ExprBuilder;

  std::shared_ptr<const detail::ExprNode> node_;
};

/// Total term order: negative/zero/positive like strcmp.
int compare(const Expr &lhs, const Expr &rhs);

struct ExprLess {
  bool operator()(const Expr &lhs, const Expr &rhs) const {
    return compare(lhs, rhs) < 0;
  }
};

struct ExprHash {
  std::size_t operator()(const Expr &e) const noexcept { return e.hash(); }
};

Expr operator+(const Expr &lhs, const Expr &rhs);
Expr operator-(const Expr &lhs, const Expr &rhs);
Expr operator*(const Expr &lhs, const Expr &rhs);
/// Throws ZeroDenominator when `rhs` is the constant 0.
Expr operator/(const Expr &lhs, const Expr &rhs);
Expr operator-(const Expr &operand);

using Bindings = std::map<std::string, Expr, std::less<>>;
using NumericBindings = std::map<std::string, Rational, std::less<>>;

/// Simultaneous substitution; unbound symbols pass through.
Expr substitute(const Expr &e, const Bindings &bindings);
Expr substitute(const Expr &e, const NumericBindings &bindings);

/// Partial derivative with respect to the named symbol.
Expr differentiate(const Expr &e, std::string_view symbol);

/// Rebuilds `e` bottom-up through the canonicalizing factories. Canonical
/// inputs come back unchanged.
Expr canonicalize(const Expr &e);

std::set<std::string> free_symbols(const Expr &e);
bool depends_on(const Expr &e, std::string_view symbol);

/// Sub-expression test. Besides ordinary subtree matching, a sum (product)
/// needle also matches a sum (product) node whose operand multiset contains
/// all of the needle's operands, since flattening merges nested sums.
bool contains(const Expr &haystack, const Expr &needle);

/// Number of nodes in the expression tree (shared nodes counted per use).
std::size_t tree_size(const Expr &e);

/// Result of numeric evaluation: exact unless an exp/ln was evaluated.
using Value = std::variant<Rational, double>;

bool is_exact(const Value &v) noexcept;
double to_double(const Value &v);
std::string to_string(const Value &v);
/// Three-way numeric comparison; promotes to double when either side is.
int compare_values(const Value &lhs, const Value &rhs);

/// Evaluates with every symbol bound. Throws UnboundSymbol, DivisionByZero
/// (a denominator evaluates to 0) or DomainError (ln of a value <= 0).
Value evaluate(const Expr &e, const NumericBindings &bindings);

/// Infix rendering accepted by `parse_expr`: `+ - * / ^ exp() ln()`.
std::string to_string(const Expr &e);
std::ostream &operator<<(std::ostream &os, const Expr &e);

/// Parses the infix syntax. Decimal and scientific literals (1.5, 2e-3) are
/// read as exact rationals. Throws ParseError or ZeroDenominator.
Expr parse_expr(std::string_view text);

bool is_valid_identifier(std::string_view name) noexcept;

namespace detail {

struct ExprNode {
  ExprKind kind = ExprKind::Constant;
  std::size_t hash = 0;
  Rational value;
  std::string name;
  std::vector<Expr> operands;
  long exponent = 0;
};

} // namespace detail

} // namespace symta
