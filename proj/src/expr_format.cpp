#include "symta/error.hpp"
#include "symta/expr.hpp"

#include <cctype>
#include <ostream>
#include <sstream>

namespace symta {

namespace {

bool is_negative_term(const Expr &e) {
  if (e.is_constant())
    return e.value() < 0;
  return e.kind() == ExprKind::Product && e.operands().front().is_constant() &&
         e.operands().front().value() < 0;
}

void print(std::ostream &os, const Expr &e);

/// Prints `e` so that it binds tighter than `*` and `^`.
void print_atom(std::ostream &os, const Expr &e) {
  bool bare = e.is_symbol() || e.kind() == ExprKind::Exp ||
              e.kind() == ExprKind::Ln ||
              (e.is_constant() && e.value() >= 0 && e.value().get_den() == 1);
  if (bare) {
    print(os, e);
  } else {
    os << '(';
    print(os, e);
    os << ')';
  }
}

void print_factor(std::ostream &os, const Expr &base, long exponent) {
  print_atom(os, base);
  if (exponent != 1)
    os << '^' << exponent;
}

void print_product(std::ostream &os, const Expr &e) {
  auto ops = e.operands();
  Rational coef(1);
  std::vector<std::pair<Expr, long>> numer;
  std::vector<std::pair<Expr, long>> denom;
  for (const Expr &f : ops) {
    if (f.is_constant()) {
      coef = f.value();
    } else if (f.kind() == ExprKind::Power && f.exponent() < 0) {
      denom.emplace_back(f.base(), -f.exponent());
    } else if (f.kind() == ExprKind::Power) {
      numer.emplace_back(f.base(), f.exponent());
    } else {
      numer.emplace_back(f, 1);
    }
  }

  bool first = true;
  if (coef == -1) {
    os << '-';
  } else if (coef != 1) {
    os << coef.get_str();
    first = false;
  }
  if (numer.empty()) {
    if (first)
      os << '1';
  }
  for (const auto &[base, exponent] : numer) {
    if (!first)
      os << '*';
    print_factor(os, base, exponent);
    first = false;
  }
  if (denom.empty())
    return;
  os << '/';
  bool group = denom.size() > 1;
  if (group)
    os << '(';
  for (std::size_t i = 0; i < denom.size(); ++i) {
    if (i)
      os << '*';
    print_factor(os, denom[i].first, denom[i].second);
  }
  if (group)
    os << ')';
}

void print_sum(std::ostream &os, const Expr &e) {
  bool first = true;
  for (const Expr &term : e.operands()) {
    if (first) {
      print(os, term);
      first = false;
      continue;
    }
    if (is_negative_term(term)) {
      os << " - ";
      print(os, -term);
    } else {
      os << " + ";
      print(os, term);
    }
  }
}

void print(std::ostream &os, const Expr &e) {
  switch (e.kind()) {
  case ExprKind::Constant:
    os << e.value().get_str();
    break;
  case ExprKind::Symbol:
    os << e.name();
    break;
  case ExprKind::Sum:
    print_sum(os, e);
    break;
  case ExprKind::Product:
    print_product(os, e);
    break;
  case ExprKind::Power:
    if (e.exponent() < 0) {
      os << "1/";
      print_factor(os, e.base(), -e.exponent());
    } else {
      print_factor(os, e.base(), e.exponent());
    }
    break;
  case ExprKind::Exp:
    os << "exp(";
    print(os, e.argument());
    os << ')';
    break;
  case ExprKind::Ln:
    os << "ln(";
    print(os, e.argument());
    os << ')';
    break;
  }
}

class Parser {
public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse() {
    Expr e = parse_sum();
    skip_space();
    if (pos_ != text_.size())
      fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

private:
  [[noreturn]] void fail(const std::string &what) const {
    throw Error(ErrorKind::ParseError,
                what + " at column " + std::to_string(pos_ + 1) + " in '" +
                    std::string(text_) + "'");
  }

  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c))
      fail(std::string("expected '") + c + "'");
  }

  Expr parse_sum() {
    std::vector<Expr> terms{parse_term()};
    for (;;) {
      if (accept('+'))
        terms.push_back(parse_term());
      else if (accept('-'))
        terms.push_back(-parse_term());
      else
        break;
    }
    return terms.size() == 1 ? terms.front() : Expr::sum(std::move(terms));
  }

  Expr parse_term() {
    Expr acc = parse_unary();
    for (;;) {
      if (accept('*')) {
        acc = acc * parse_unary();
      } else if (accept('/')) {
        Expr rhs = parse_unary();
        if (rhs.is_zero())
          throw Error(ErrorKind::ZeroDenominator,
                      "division by the constant 0 in '" + std::string(text_) + "'");
        acc = acc / rhs;
      } else {
        break;
      }
    }
    return acc;
  }

  Expr parse_unary() {
    if (accept('-'))
      return -parse_unary();
    if (accept('+'))
      return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (!accept('^'))
      return base;
    return Expr::power(base, parse_exponent());
  }

  long parse_exponent() {
    bool paren = accept('(');
    bool negative = false;
    if (accept('-'))
      negative = true;
    else
      accept('+');
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (start == pos_)
      fail("exponent must be an integer");
    long n = std::stol(std::string(text_.substr(start, pos_ - start)));
    if (paren)
      expect(')');
    return negative ? -n : n;
  }

  Expr parse_number() {
    std::size_t start = pos_;
    auto digits = [&] {
      std::size_t s = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      return std::string(text_.substr(s, pos_ - s));
    };
    std::string whole = digits();
    std::string frac;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      frac = digits();
    }
    if (whole.empty() && frac.empty())
      fail("malformed number");
    long exp10 = 0;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      bool neg = false;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-'))
        neg = text_[pos_++] == '-';
      std::string ed = digits();
      if (ed.empty()) {
        pos_ = save;
      } else {
        exp10 = std::stol(ed) * (neg ? -1 : 1);
      }
    }
    mpz_class mantissa((whole.empty() ? "0" : whole) + frac, 10);
    exp10 -= static_cast<long>(frac.size());
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
    Rational q = exp10 < 0 ? Rational(mantissa, scale) : Rational(mantissa * scale);
    q.canonicalize();
    (void)start;
    return Expr::constant(q);
  }

  Expr parse_primary() {
    skip_space();
    if (pos_ >= text_.size())
      fail("unexpected end of expression");
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return parse_number();
    if (c == '(') {
      ++pos_;
      Expr inner = parse_sum();
      expect(')');
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string_view ident = text_.substr(start, pos_ - start);
      if (ident == "exp" || ident == "ln") {
        expect('(');
        Expr arg = parse_sum();
        expect(')');
        return ident == "exp" ? Expr::exp(arg) : Expr::ln(arg);
      }
      return Expr::symbol(ident);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

} // namespace

std::string to_string(const Expr &e) {
  std::ostringstream os;
  print(os, e);
  return os.str();
}

std::ostream &operator<<(std::ostream &os, const Expr &e) {
  print(os, e);
  return os;
}

Expr parse_expr(std::string_view text) {
  Parser p(text);
  return p.parse();
}

} // namespace symta
