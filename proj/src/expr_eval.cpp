#include "symta/error.hpp"
#include "symta/expr.hpp"

#include <cmath>
#include <sstream>
#include <unordered_map>

namespace symta {

bool is_exact(const Value &v) noexcept {
  return std::holds_alternative<Rational>(v);
}

double to_double(const Value &v) {
  if (const auto *q = std::get_if<Rational>(&v))
    return q->get_d();
  return std::get<double>(v);
}

std::string to_string(const Value &v) {
  if (const auto *q = std::get_if<Rational>(&v))
    return q->get_str();
  std::ostringstream os;
  os.precision(17);
  os << std::get<double>(v);
  return os.str();
}

int compare_values(const Value &lhs, const Value &rhs) {
  if (is_exact(lhs) && is_exact(rhs)) {
    int c = cmp(std::get<Rational>(lhs), std::get<Rational>(rhs));
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  double a = to_double(lhs);
  double b = to_double(rhs);
  return a < b ? -1 : (a > b ? 1 : 0);
}

namespace {

bool is_zero_value(const Value &v) {
  if (const auto *q = std::get_if<Rational>(&v))
    return *q == 0;
  return std::get<double>(v) == 0.0;
}

Value add(const Value &a, const Value &b) {
  if (is_exact(a) && is_exact(b))
    return Value(Rational(std::get<Rational>(a) + std::get<Rational>(b)));
  return Value(to_double(a) + to_double(b));
}

Value mul(const Value &a, const Value &b) {
  if (is_exact(a) && is_exact(b))
    return Value(Rational(std::get<Rational>(a) * std::get<Rational>(b)));
  return Value(to_double(a) * to_double(b));
}

Value ipow(const Value &base, long exponent) {
  if (exponent < 0 && is_zero_value(base))
    throw Error(ErrorKind::DivisionByZero, "denominator evaluates to 0");
  if (const auto *q = std::get_if<Rational>(&base)) {
    Rational b = exponent < 0 ? Rational(Rational(1) / *q) : *q;
    unsigned long n = static_cast<unsigned long>(exponent < 0 ? -exponent : exponent);
    Rational result;
    mpz_pow_ui(result.get_num_mpz_t(), b.get_num_mpz_t(), n);
    mpz_pow_ui(result.get_den_mpz_t(), b.get_den_mpz_t(), n);
    result.canonicalize();
    return Value(result);
  }
  return Value(std::pow(std::get<double>(base), static_cast<double>(exponent)));
}

class Evaluator {
public:
  explicit Evaluator(const NumericBindings &bindings) : bindings_(bindings) {}

  Value operator()(const Expr &e) {
    switch (e.kind()) {
    case ExprKind::Constant:
      return Value(e.value());
    case ExprKind::Symbol: {
      auto it = bindings_.find(e.name());
      if (it == bindings_.end())
        throw Error(ErrorKind::UnboundSymbol,
                    "symbol '" + e.name() + "' has no value", e.name());
      return Value(it->second);
    }
    default:
      break;
    }
    if (auto it = memo_.find(e.id()); it != memo_.end())
      return it->second;
    Value v = compute(e);
    memo_.emplace(e.id(), v);
    return v;
  }

private:
  Value compute(const Expr &e) {
    switch (e.kind()) {
    case ExprKind::Sum: {
      Value acc(Rational(0));
      for (const Expr &t : e.operands())
        acc = add(acc, (*this)(t));
      return acc;
    }
    case ExprKind::Product: {
      // Denominators first, so 0 * (1/0) still reports the division.
      Value acc(Rational(1));
      for (const Expr &f : e.operands())
        if (f.kind() == ExprKind::Power && f.exponent() < 0)
          acc = mul(acc, (*this)(f));
      for (const Expr &f : e.operands())
        if (!(f.kind() == ExprKind::Power && f.exponent() < 0))
          acc = mul(acc, (*this)(f));
      return acc;
    }
    case ExprKind::Power:
      return ipow((*this)(e.base()), e.exponent());
    case ExprKind::Exp:
      return Value(std::exp(to_double((*this)(e.argument()))));
    case ExprKind::Ln: {
      Value arg = (*this)(e.argument());
      if (compare_values(arg, Value(Rational(0))) <= 0)
        throw Error(ErrorKind::DomainError,
                    "ln of non-positive value " + to_string(arg));
      return Value(std::log(to_double(arg)));
    }
    default:
      return Value(Rational(0));
    }
  }

  const NumericBindings &bindings_;
  std::unordered_map<const void *, Value> memo_;
};

} // namespace

Value evaluate(const Expr &e, const NumericBindings &bindings) {
  Evaluator eval(bindings);
  return eval(e);
}

} // namespace symta
