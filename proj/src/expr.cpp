#include "symta/expr.hpp"

#include "symta/error.hpp"

#include <algorithm>
#include <optional>
#include <unordered_map>
#include <utility>

namespace symta {

namespace {

std::size_t mix(std::size_t seed, std::size_t value) {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_rational(const Rational &q) {
  std::hash<std::string> h;
  return mix(h(q.get_num().get_str(16)), h(q.get_den().get_str(16)));
}

const Rational &rational_zero() {
  static const Rational zero(0);
  return zero;
}

} // namespace

/// Raw node construction. Callers guarantee the operands are already in
/// canonical order and shape.
class ExprBuilder {
public:
  static Expr constant(Rational value) {
    auto node = std::make_shared<detail::ExprNode>();
    node->kind = ExprKind::Constant;
    value.canonicalize();
    node->hash = mix(1, hash_rational(value));
    node->value = std::move(value);
    return Expr(std::move(node));
  }

  static Expr symbol(std::string name) {
    auto node = std::make_shared<detail::ExprNode>();
    node->kind = ExprKind::Symbol;
    node->hash = mix(2, std::hash<std::string>{}(name));
    node->name = std::move(name);
    return Expr(std::move(node));
  }

  static Expr nary(ExprKind kind, std::vector<Expr> operands) {
    auto node = std::make_shared<detail::ExprNode>();
    node->kind = kind;
    std::size_t h = static_cast<std::size_t>(kind) + 11;
    for (const Expr &op : operands)
      h = mix(h, op.hash());
    node->hash = h;
    node->operands = std::move(operands);
    return Expr(std::move(node));
  }

  static Expr power(Expr base, long exponent) {
    auto node = std::make_shared<detail::ExprNode>();
    node->kind = ExprKind::Power;
    node->hash = mix(mix(31, base.hash()), std::hash<long>{}(exponent));
    node->exponent = exponent;
    node->operands.push_back(std::move(base));
    return Expr(std::move(node));
  }
};

Expr::Expr() : Expr(ExprBuilder::constant(Rational(0))) {}

Expr Expr::constant(const Rational &value) {
  return ExprBuilder::constant(value);
}

Expr Expr::integer(long value) { return ExprBuilder::constant(Rational(value)); }

Expr Expr::rational(long num, long den) {
  if (den == 0)
    throw Error(ErrorKind::ZeroDenominator,
                "rational constant " + std::to_string(num) + "/0");
  return ExprBuilder::constant(Rational(num, den));
}

bool is_valid_identifier(std::string_view name) noexcept {
  if (name.empty())
    return false;
  auto alpha = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(name.front()))
    return false;
  return std::all_of(name.begin(), name.end(),
                     [&](char c) { return alpha(c) || digit(c); });
}

Expr Expr::symbol(std::string_view name) {
  if (!is_valid_identifier(name) || name == "exp" || name == "ln")
    throw Error(ErrorKind::InvalidSymbol,
                "invalid symbol name '" + std::string(name) + "'",
                std::string(name));
  return ExprBuilder::symbol(std::string(name));
}

ExprKind Expr::kind() const noexcept { return node_->kind; }

bool Expr::is_zero() const noexcept {
  return is_constant() && node_->value == 0;
}

bool Expr::is_one() const noexcept {
  return is_constant() && node_->value == 1;
}

const Rational &Expr::value() const {
  return is_constant() ? node_->value : rational_zero();
}

const std::string &Expr::name() const { return node_->name; }

std::span<const Expr> Expr::operands() const noexcept {
  return node_->operands;
}

const Expr &Expr::base() const { return node_->operands.front(); }

long Expr::exponent() const { return node_->exponent; }

const Expr &Expr::argument() const { return node_->operands.front(); }

std::size_t Expr::hash() const noexcept { return node_->hash; }

bool operator==(const Expr &lhs, const Expr &rhs) {
  if (lhs.node_ == rhs.node_)
    return true;
  if (lhs.hash() != rhs.hash())
    return false;
  return compare(lhs, rhs) == 0;
}

int compare(const Expr &lhs, const Expr &rhs) {
  if (lhs.id() == rhs.id())
    return 0;
  if (lhs.kind() != rhs.kind())
    return lhs.kind() < rhs.kind() ? -1 : 1;
  switch (lhs.kind()) {
  case ExprKind::Constant:
    return cmp(lhs.value(), rhs.value()) < 0   ? -1
           : cmp(lhs.value(), rhs.value()) > 0 ? 1
                                               : 0;
  case ExprKind::Symbol: {
    int c = lhs.name().compare(rhs.name());
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  case ExprKind::Power: {
    if (int c = compare(lhs.base(), rhs.base()))
      return c;
    if (lhs.exponent() != rhs.exponent())
      return lhs.exponent() < rhs.exponent() ? -1 : 1;
    return 0;
  }
  case ExprKind::Product:
  case ExprKind::Sum:
  case ExprKind::Exp:
  case ExprKind::Ln: {
    auto a = lhs.operands();
    auto b = rhs.operands();
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i)
      if (int c = compare(a[i], b[i]))
        return c;
    if (a.size() != b.size())
      return a.size() < b.size() ? -1 : 1;
    return 0;
  }
  }
  return 0;
}

namespace {

/// Splits a canonical term into numeric coefficient and remaining monomial.
/// The monomial is empty (nullopt) for a pure constant.
std::pair<Rational, std::optional<Expr>> split_coefficient(const Expr &term) {
  if (term.is_constant())
    return {term.value(), std::nullopt};
  if (term.kind() == ExprKind::Product && term.operands().front().is_constant()) {
    auto ops = term.operands();
    Rational coef = ops.front().value();
    if (ops.size() == 2)
      return {coef, ops[1]};
    std::vector<Expr> rest(ops.begin() + 1, ops.end());
    return {coef, ExprBuilder::nary(ExprKind::Product, std::move(rest))};
  }
  return {Rational(1), term};
}

Expr scale_monomial(const Rational &coef, const Expr &monomial) {
  if (coef == 1)
    return monomial;
  std::vector<Expr> ops;
  ops.push_back(ExprBuilder::constant(coef));
  if (monomial.kind() == ExprKind::Product)
    ops.insert(ops.end(), monomial.operands().begin(), monomial.operands().end());
  else
    ops.push_back(monomial);
  return ExprBuilder::nary(ExprKind::Product, std::move(ops));
}

Rational rational_power(const Rational &base, long exponent) {
  Rational result(1);
  Rational b = exponent < 0 ? Rational(1) / base : base;
  unsigned long n = exponent < 0 ? static_cast<unsigned long>(-exponent)
                                 : static_cast<unsigned long>(exponent);
  mpz_pow_ui(result.get_num_mpz_t(), b.get_num_mpz_t(), n);
  mpz_pow_ui(result.get_den_mpz_t(), b.get_den_mpz_t(), n);
  result.canonicalize();
  return result;
}

/// Splits a sum into c * s where the first non-constant term of s has
/// coefficient 1.
std::pair<Rational, Expr> primitive_part(const Expr &sum) {
  const auto &terms = sum.operands();
  Rational content(1);
  for (const Expr &t : terms)
    if (!t.is_constant()) {
      content = split_coefficient(t).first;
      break;
    }
  if (content == 1)
    return {content, sum};
  std::vector<Expr> scaled;
  scaled.reserve(terms.size());
  for (const Expr &t : terms) {
    auto [coef, monomial] = split_coefficient(t);
    Rational c = coef / content;
    scaled.push_back(monomial ? scale_monomial(c, *monomial) : ExprBuilder::constant(c));
  }
  return {content, ExprBuilder::nary(ExprKind::Sum, std::move(scaled))};
}

} // namespace

Expr Expr::sum(std::vector<Expr> terms) {
  Rational constant(0);
  std::map<Expr, Rational, ExprLess> monomials;

  auto absorb = [&](const Expr &term) {
    auto [coef, monomial] = split_coefficient(term);
    if (!monomial) {
      constant += coef;
      return;
    }
    auto [it, inserted] = monomials.try_emplace(*monomial, coef);
    if (!inserted)
      it->second += coef;
  };

  for (const Expr &t : terms) {
    if (t.kind() == ExprKind::Sum) {
      for (const Expr &inner : t.operands())
        absorb(inner);
    } else {
      absorb(t);
    }
  }

  std::vector<Expr> out;
  out.reserve(monomials.size() + 1);
  if (constant != 0)
    out.push_back(ExprBuilder::constant(constant));
  for (const auto &[monomial, coef] : monomials)
    if (coef != 0)
      out.push_back(scale_monomial(coef, monomial));

  if (out.empty())
    return Expr();
  if (out.size() == 1)
    return out.front();
  return ExprBuilder::nary(ExprKind::Sum, std::move(out));
}

Expr Expr::product(std::vector<Expr> factors) {
  Rational coef(1);
  std::map<Expr, long, ExprLess> powers;

  auto absorb = [&](const Expr &f) {
    if (f.is_constant()) {
      coef *= f.value();
      return;
    }
    Expr base = f.kind() == ExprKind::Power ? f.base() : f;
    long exponent = f.kind() == ExprKind::Power ? f.exponent() : 1;
    if (base.kind() == ExprKind::Sum) {
      auto [content, primitive] = primitive_part(base);
      coef *= rational_power(content, exponent);
      base = primitive;
    }
    powers[base] += exponent;
  };

  for (const Expr &f : factors) {
    if (f.kind() == ExprKind::Product) {
      for (const Expr &inner : f.operands())
        absorb(inner);
    } else {
      absorb(f);
    }
  }

  if (coef == 0)
    return Expr();

  std::vector<Expr> out;
  for (const auto &[base, exponent] : powers) {
    if (exponent == 0)
      continue;
    out.push_back(exponent == 1 ? base : ExprBuilder::power(base, exponent));
  }

  if (out.empty())
    return ExprBuilder::constant(coef);
  if (out.size() == 1) {
    if (coef == 1)
      return out.front();
    if (out.front().kind() == ExprKind::Sum) {
      std::vector<Expr> scaled;
      scaled.reserve(out.front().operands().size());
      for (const Expr &term : out.front().operands())
        scaled.push_back(Expr::product({ExprBuilder::constant(coef), term}));
      return Expr::sum(std::move(scaled));
    }
  }
  if (coef != 1)
    out.insert(out.begin(), ExprBuilder::constant(coef));
  return ExprBuilder::nary(ExprKind::Product, std::move(out));
}

Expr Expr::power(const Expr &base, long exponent) {
  if (exponent == 0)
    return Expr::integer(1);
  if (exponent == 1)
    return base;
  switch (base.kind()) {
  case ExprKind::Constant:
    if (base.value() == 0) {
      if (exponent < 0)
        throw Error(ErrorKind::ZeroDenominator, "zero raised to a negative power");
      return Expr();
    }
    return ExprBuilder::constant(rational_power(base.value(), exponent));
  case ExprKind::Power:
    return Expr::power(base.base(), base.exponent() * exponent);
  case ExprKind::Product: {
    std::vector<Expr> factors;
    factors.reserve(base.operands().size());
    for (const Expr &f : base.operands())
      factors.push_back(Expr::power(f, exponent));
    return Expr::product(std::move(factors));
  }
  case ExprKind::Sum: {
    auto [content, primitive] = primitive_part(base);
    if (content != 1)
      return Expr::product({ExprBuilder::constant(rational_power(content, exponent)),
                            ExprBuilder::power(primitive, exponent)});
    return ExprBuilder::power(base, exponent);
  }
  default:
    return ExprBuilder::power(base, exponent);
  }
}

Expr Expr::exp(const Expr &arg) {
  if (arg.is_zero())
    return Expr::integer(1);
  return ExprBuilder::nary(ExprKind::Exp, {arg});
}

Expr Expr::ln(const Expr &arg) {
  if (arg.is_one())
    return Expr();
  return ExprBuilder::nary(ExprKind::Ln, {arg});
}

Expr operator+(const Expr &lhs, const Expr &rhs) { return Expr::sum({lhs, rhs}); }

Expr operator-(const Expr &lhs, const Expr &rhs) {
  return Expr::sum({lhs, -rhs});
}

Expr operator*(const Expr &lhs, const Expr &rhs) {
  return Expr::product({lhs, rhs});
}

Expr operator/(const Expr &lhs, const Expr &rhs) {
  return Expr::product({lhs, Expr::power(rhs, -1)});
}

Expr operator-(const Expr &operand) {
  return Expr::product({Expr::integer(-1), operand});
}

namespace {

Expr rebuild(const Expr &e, std::vector<Expr> ops) {
  switch (e.kind()) {
  case ExprKind::Sum:
    return Expr::sum(std::move(ops));
  case ExprKind::Product:
    return Expr::product(std::move(ops));
  case ExprKind::Power:
    return Expr::power(ops.front(), e.exponent());
  case ExprKind::Exp:
    return Expr::exp(ops.front());
  case ExprKind::Ln:
    return Expr::ln(ops.front());
  default:
    return e;
  }
}

template <typename Leaf> class Rewriter {
public:
  explicit Rewriter(Leaf leaf) : leaf_(std::move(leaf)) {}

  Expr operator()(const Expr &e) {
    if (e.is_constant() || e.is_symbol())
      return leaf_(e);
    if (auto it = memo_.find(e.id()); it != memo_.end())
      return it->second;
    std::vector<Expr> ops;
    ops.reserve(e.operands().size());
    for (const Expr &op : e.operands())
      ops.push_back((*this)(op));
    Expr result = rebuild(e, std::move(ops));
    memo_.emplace(e.id(), result);
    return result;
  }

private:
  Leaf leaf_;
  std::unordered_map<const void *, Expr> memo_;
};

} // namespace

Expr substitute(const Expr &e, const Bindings &bindings) {
  if (bindings.empty())
    return e;
  Rewriter rw([&](const Expr &leaf) {
    if (leaf.is_symbol())
      if (auto it = bindings.find(leaf.name()); it != bindings.end())
        return it->second;
    return leaf;
  });
  return rw(e);
}

Expr substitute(const Expr &e, const NumericBindings &bindings) {
  Bindings symbolic;
  for (const auto &[name, value] : bindings)
    symbolic.emplace(name, Expr::constant(value));
  return substitute(e, symbolic);
}

Expr canonicalize(const Expr &e) {
  Rewriter rw([](const Expr &leaf) {
    return leaf.is_constant() ? Expr::constant(leaf.value())
                              : Expr::symbol(leaf.name());
  });
  return rw(e);
}

namespace {

class Differentiator {
public:
  explicit Differentiator(std::string_view wrt) : wrt_(wrt) {}

  Expr operator()(const Expr &e) {
    switch (e.kind()) {
    case ExprKind::Constant:
      return Expr();
    case ExprKind::Symbol:
      return e.name() == wrt_ ? Expr::integer(1) : Expr();
    default:
      break;
    }
    if (auto it = memo_.find(e.id()); it != memo_.end())
      return it->second;
    Expr result = derive(e);
    memo_.emplace(e.id(), result);
    return result;
  }

private:
  Expr derive(const Expr &e) {
    switch (e.kind()) {
    case ExprKind::Sum: {
      std::vector<Expr> terms;
      for (const Expr &t : e.operands())
        terms.push_back((*this)(t));
      return Expr::sum(std::move(terms));
    }
    case ExprKind::Product: {
      auto ops = e.operands();
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < ops.size(); ++i) {
        Expr d = (*this)(ops[i]);
        if (d.is_zero())
          continue;
        std::vector<Expr> factors{d};
        for (std::size_t j = 0; j < ops.size(); ++j)
          if (j != i)
            factors.push_back(ops[j]);
        terms.push_back(Expr::product(std::move(factors)));
      }
      return Expr::sum(std::move(terms));
    }
    case ExprKind::Power: {
      Expr d = (*this)(e.base());
      if (d.is_zero())
        return Expr();
      return Expr::product({Expr::integer(e.exponent()),
                            Expr::power(e.base(), e.exponent() - 1), d});
    }
    case ExprKind::Exp: {
      Expr d = (*this)(e.argument());
      return d.is_zero() ? Expr() : Expr::product({e, d});
    }
    case ExprKind::Ln: {
      Expr d = (*this)(e.argument());
      return d.is_zero() ? Expr()
                         : Expr::product({d, Expr::power(e.argument(), -1)});
    }
    default:
      return Expr();
    }
  }

  std::string_view wrt_;
  std::unordered_map<const void *, Expr> memo_;
};

void collect_symbols(const Expr &e, std::set<std::string> &out,
                     std::set<const void *> &seen) {
  if (e.is_symbol()) {
    out.insert(e.name());
    return;
  }
  if (e.operands().empty() || !seen.insert(e.id()).second)
    return;
  for (const Expr &op : e.operands())
    collect_symbols(op, out, seen);
}

bool multiset_includes(std::span<const Expr> haystack,
                       std::span<const Expr> needle) {
  if (needle.size() > haystack.size())
    return false;
  std::vector<bool> used(haystack.size(), false);
  for (const Expr &n : needle) {
    bool found = false;
    for (std::size_t i = 0; i < haystack.size() && !found; ++i) {
      if (!used[i] && haystack[i] == n) {
        used[i] = true;
        found = true;
      }
    }
    if (!found)
      return false;
  }
  return true;
}

bool contains_impl(const Expr &h, const Expr &n,
                   std::set<const void *> &seen) {
  if (h == n)
    return true;
  if (h.kind() == n.kind() &&
      (h.kind() == ExprKind::Sum || h.kind() == ExprKind::Product) &&
      multiset_includes(h.operands(), n.operands()))
    return true;
  if (h.operands().empty() || !seen.insert(h.id()).second)
    return false;
  for (const Expr &op : h.operands())
    if (contains_impl(op, n, seen))
      return true;
  return false;
}

} // namespace

Expr differentiate(const Expr &e, std::string_view symbol) {
  if (!depends_on(e, symbol))
    return Expr();
  Differentiator d(symbol);
  return d(e);
}

std::set<std::string> free_symbols(const Expr &e) {
  std::set<std::string> out;
  std::set<const void *> seen;
  collect_symbols(e, out, seen);
  return out;
}

bool depends_on(const Expr &e, std::string_view symbol) {
  return free_symbols(e).contains(std::string(symbol));
}

bool contains(const Expr &haystack, const Expr &needle) {
  std::set<const void *> seen;
  return contains_impl(haystack, needle, seen);
}

std::size_t tree_size(const Expr &e) {
  std::size_t n = 1;
  for (const Expr &op : e.operands())
    n += tree_size(op);
  return n;
}

} // namespace symta
