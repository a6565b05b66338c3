#include "symta/analysis.hpp"

#include "symta/error.hpp"
#include "text_util.hpp"

#include <set>
#include <sstream>

namespace symta {

namespace {

Rational exact_value(std::string_view text, int line) {
  try {
    Value v = evaluate(parse_expr(text), {});
    if (const Rational *q = std::get_if<Rational>(&v))
      return *q;
  } catch (const Error &e) {
    throw Error(ErrorKind::ParseError, e.what(), std::string(text), line);
  }
  throw Error(ErrorKind::ParseError, "value must be an exact rational: " + std::string(text),
              std::string(text), line);
}

} // namespace

NumericBindings parse_binding(std::string_view source) {
  NumericBindings out;
  int line_no = 0;
  for (std::string_view raw : text::lines(source)) {
    ++line_no;
    std::string_view line = text::trim(text::strip_comment(raw));
    if (line.empty())
      continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorKind::ParseError, "expected '<name> = <value>'", {}, line_no);
    std::string name(text::trim(line.substr(0, eq)));
    if (!is_valid_identifier(name))
      throw Error(ErrorKind::InvalidSymbol, "invalid symbol name '" + name + "'", name,
                  line_no);
    out.insert_or_assign(name, exact_value(text::trim(line.substr(eq + 1)), line_no));
  }
  return out;
}

NumericBindings load_binding(const std::filesystem::path &path) {
  return parse_binding(text::read_file(path));
}

ConsistencyReport check_consistency(const TimingSolution &sol,
                                    const NumericBindings &binding,
                                    const CheckOptions &options) {
  for (const std::string &sym : sol.free_symbols())
    if (!binding.contains(sym))
      throw Error(ErrorKind::UnboundSymbol, "binding has no value for " + sym, sym);

  if (options.strict_physical) {
    std::set<std::string> physical = sol.parameter_symbols;
    physical.insert(sol.opaque_symbols.begin(), sol.opaque_symbols.end());
    for (const std::string &sym : physical) {
      auto it = binding.find(sym);
      if (it != binding.end() && it->second <= 0)
        throw Error(ErrorKind::ValidationError,
                    "physical parameter " + sym + " must be > 0, got " + it->second.get_str(),
                    sym);
    }
  }

  ConsistencyReport report;
  report.times.reserve(sol.times.size());
  for (const Expr &t : sol.times)
    report.times.push_back(evaluate(t, binding));

  for (std::size_t k = 0; k + 1 < report.times.size(); ++k) {
    int cmp = compare_values(report.times[k], report.times[k + 1]);
    if (cmp >= 0) {
      report.consistent = false;
      report.first_violation =
          OrderViolation{k, k + 1, report.times[k], report.times[k + 1], cmp == 0};
      break;
    }
  }

  for (std::size_t i = 0; i < sol.steps.size(); ++i) {
    const GateStep &s = sol.steps[i];
    if (!s.delay)
      continue;
    Value d = evaluate(*s.delay, binding);
    if (compare_values(d, Value(Rational(0))) > 0)
      continue;
    std::ostringstream msg;
    msg << "delay " << to_string(d) << " <= 0 at gate "
        << (s.gate < sol.gate_ids.size() ? sol.gate_ids[s.gate] : "#" + std::to_string(s.gate))
        << " for "
        << sol.schedule.events[s.event].label() << " ("
        << (s.pair ? "pair " + to_string(*s.pair)
                   : std::string("cold case ") + to_char(s.label))
        << ")";
    report.warnings.push_back({i, s.gate, s.event, d, msg.str()});
  }
  return report;
}

Expr sensitivity(const TimingSolution &sol, std::size_t event, std::string_view wrt) {
  const Expr &t = sol.time(event);
  std::string name(wrt);
  if (!sol.free_symbols().contains(name) && !sol.parameter_symbols.contains(name))
    throw Error(ErrorKind::UnknownSymbol, "symbol " + name + " does not occur in the solution",
                name);
  return canonicalize(differentiate(t, wrt));
}

std::vector<OrderingConstraint> solve_ordering_region(const TimingSolution &sol,
                                                      const std::vector<std::string> &free,
                                                      const NumericBindings &fixed) {
  NumericBindings pinned;
  if (!free.empty()) {
    std::set<std::string> keep(free.begin(), free.end());
    for (const auto &[name, value] : fixed)
      if (!keep.contains(name))
        pinned.insert_or_assign(name, value);
  }
  std::vector<OrderingConstraint> out;
  for (std::size_t k = 0; k + 1 < sol.times.size(); ++k) {
    Expr diff = canonicalize(sol.times[k + 1] - sol.times[k]);
    if (!pinned.empty())
      diff = canonicalize(substitute(diff, pinned));
    out.push_back({k, k + 1, diff});
  }
  return out;
}

namespace {

std::string smt_rational(const Rational &q) {
  auto integer = [](const mpz_class &z) { return z.get_str() + ".0"; };
  std::string body = q.get_den() == 1
                         ? integer(abs(q.get_num()))
                         : "(/ " + integer(abs(q.get_num())) + " " + integer(q.get_den()) + ")";
  return sgn(q) < 0 ? "(- " + body + ")" : body;
}

std::string smt_join(const char *op, const std::vector<std::string> &parts) {
  if (parts.size() == 1)
    return parts.front();
  std::string s = std::string("(") + op;
  for (const std::string &p : parts)
    s += " " + p;
  return s + ")";
}

std::string smt_power(const std::string &base, long n) {
  std::vector<std::string> parts(static_cast<std::size_t>(n), base);
  return smt_join("*", parts);
}

std::string smt_term(const Expr &e);

std::string smt_product(const Expr &e) {
  const Expr &lead = e.operands().front();
  if (lead.kind() == ExprKind::Constant && sgn(lead.value()) < 0)
    return "(- " + smt_term(-e) + ")";
  std::vector<std::string> num, den;
  for (const Expr &f : e.operands()) {
    if (f.kind() == ExprKind::Constant) {
      const Rational &q = f.value();
      if (q.get_num() != 1)
        num.push_back(smt_rational(Rational(q.get_num())));
      if (q.get_den() != 1)
        den.push_back(smt_rational(Rational(q.get_den())));
    } else if (f.kind() == ExprKind::Power && f.exponent() < 0) {
      den.push_back(smt_power(smt_term(f.base()), -f.exponent()));
    } else {
      num.push_back(smt_term(f));
    }
  }
  std::string n = num.empty() ? "1.0" : smt_join("*", num);
  if (den.empty())
    return n;
  return "(/ " + n + " " + smt_join("*", den) + ")";
}

std::string smt_term(const Expr &e) {
  switch (e.kind()) {
  case ExprKind::Constant:
    return smt_rational(e.value());
  case ExprKind::Symbol:
    return e.name();
  case ExprKind::Power:
    if (e.exponent() < 0)
      return "(/ 1.0 " + smt_power(smt_term(e.base()), -e.exponent()) + ")";
    return smt_power(smt_term(e.base()), e.exponent());
  case ExprKind::Product:
    return smt_product(e);
  case ExprKind::Sum: {
    std::vector<std::string> pos, neg;
    for (const Expr &t : e.operands()) {
      bool negative = (t.kind() == ExprKind::Constant && sgn(t.value()) < 0) ||
                      (t.kind() == ExprKind::Product &&
                       t.operands().front().kind() == ExprKind::Constant &&
                       sgn(t.operands().front().value()) < 0);
      if (negative)
        neg.push_back(smt_term(-t));
      else
        pos.push_back(smt_term(t));
    }
    if (neg.empty())
      return smt_join("+", pos);
    if (pos.empty())
      return "(- " + smt_join("+", neg) + ")";
    return "(- " + smt_join("+", pos) + " " + smt_join("+", neg) + ")";
  }
  case ExprKind::Exp:
  case ExprKind::Ln:
    throw Error(ErrorKind::UnsupportedOperator,
                std::string(e.kind() == ExprKind::Exp ? "exp" : "ln") +
                    " cannot be expressed in QF_NRA",
                to_string(e));
  }
  return {};
}

} // namespace

std::string to_smt(const Expr &e) { return smt_term(e); }

std::string export_smt(const std::vector<Expr> &positive,
                       const std::vector<std::string> &declarations,
                       const NumericBindings &fixed) {
  std::vector<std::string> asserts;
  std::set<std::string> symbols(declarations.begin(), declarations.end());
  for (const Expr &e : positive) {
    asserts.push_back("(assert (> " + smt_term(e) + " 0.0))");
    symbols.merge(free_symbols(e));
  }
  for (const auto &[name, value] : fixed)
    symbols.insert(name);

  std::ostringstream os;
  os << "(set-logic QF_NRA)\n";
  for (const std::string &s : symbols)
    os << "(declare-const " << s << " Real)\n";
  for (const std::string &a : asserts)
    os << a << "\n";
  for (const auto &[name, value] : fixed)
    os << "(assert (= " << name << " " << smt_rational(value) << "))\n";
  os << "(check-sat)\n";
  return os.str();
}

std::string export_smt(const std::vector<OrderingConstraint> &constraints,
                       const std::vector<std::string> &declarations,
                       const NumericBindings &fixed) {
  std::vector<Expr> positive;
  positive.reserve(constraints.size());
  for (const OrderingConstraint &c : constraints)
    positive.push_back(c.difference);
  return export_smt(positive, declarations, fixed);
}

std::vector<SweepRow> sweep(const Expr &e, std::string_view wrt,
                            const std::vector<Rational> &grid,
                            const NumericBindings &base) {
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  NumericBindings b = base;
  for (const Rational &v : grid) {
    b.insert_or_assign(std::string(wrt), v);
    rows.push_back({v, evaluate(e, b)});
  }
  return rows;
}

std::vector<SweepRow> sweep(const TimingSolution &sol, std::size_t event,
                            std::string_view wrt, const std::vector<Rational> &grid,
                            const NumericBindings &base) {
  return sweep(sol.time(event), wrt, grid, base);
}

std::string sweep_csv(const std::vector<SweepRow> &rows) {
  std::ostringstream os;
  os << "value,time\n";
  for (const SweepRow &r : rows)
    os << r.value.get_str() << "," << to_string(r.result) << "\n";
  return os.str();
}

std::vector<Rational> parse_grid(std::string_view source) {
  std::string_view s = text::trim(source);
  std::vector<Rational> out;
  if (s.empty())
    return out;
  if (s.find(':') != std::string_view::npos) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i)
      if (i == s.size() || s[i] == ':') {
        parts.push_back(text::trim(s.substr(start, i - start)));
        start = i + 1;
      }
    if (parts.size() != 3)
      throw Error(ErrorKind::ParseError, "grid range must be lo:hi:n", std::string(s));
    Rational lo = exact_value(parts[0], 0);
    Rational hi = exact_value(parts[1], 0);
    Rational n = exact_value(parts[2], 0);
    if (n.get_den() != 1 || n < 1)
      throw Error(ErrorKind::ParseError, "grid point count must be a positive integer",
                  std::string(parts[2]));
    long count = n.get_num().get_si();
    for (long i = 0; i < count; ++i)
      out.push_back(count == 1 ? lo : Rational(lo + (hi - lo) * i / (count - 1)));
    return out;
  }
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i)
    if (i == s.size() || s[i] == ',') {
      out.push_back(exact_value(text::trim(s.substr(start, i - start)), 0));
      start = i + 1;
    }
  return out;
}

} // namespace symta
