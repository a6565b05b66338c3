#include "symta/netlist.hpp"

#include "symta/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace symta {

bool Netlist::is_primary_input(std::string_view signal) const {
  return std::find(primary_inputs.begin(), primary_inputs.end(), signal) !=
         primary_inputs.end();
}

std::optional<std::size_t> Netlist::driver_gate(std::string_view signal) const {
  for (std::size_t i = 0; i < gates.size(); ++i)
    if (gates[i].output == signal)
      return i;
  return std::nullopt;
}

std::optional<std::size_t> Netlist::find_gate(std::string_view id) const {
  for (std::size_t i = 0; i < gates.size(); ++i)
    if (gates[i].id == id)
      return i;
  return std::nullopt;
}

bool Netlist::has_signal(std::string_view signal) const {
  return is_primary_input(signal) || driver_gate(signal).has_value();
}

std::vector<std::string> Netlist::signals() const {
  std::vector<std::string> out = primary_inputs;
  for (const Gate &g : gates)
    out.push_back(g.output);
  return out;
}

std::vector<FanoutPin> Netlist::fanout(std::string_view signal) const {
  std::vector<FanoutPin> out;
  for (std::size_t i = 0; i < gates.size(); ++i) {
    if (gates[i].input_a == signal)
      out.push_back({i, Pin::A});
    if (gates[i].input_b == signal)
      out.push_back({i, Pin::B});
  }
  return out;
}

Bindings Netlist::resolve_parameters(const Gate &gate,
                                     const std::vector<std::string> &declared) const {
  Bindings out = gate.params;
  for (const std::string &p : declared) {
    if (out.contains(p))
      continue;
    out.emplace(p, Expr::symbol(param_naming == ParamNaming::PerGate
                                    ? p + "_" + gate.id
                                    : p));
  }
  return out;
}

void validate(const Netlist &n) {
  std::set<std::string> drivers;
  auto claim = [&](const std::string &signal, const std::string &by) {
    if (!is_valid_identifier(signal))
      throw Error(ErrorKind::ValidationError, "invalid signal name '" + signal + "'",
                  signal);
    if (!drivers.insert(signal).second)
      throw Error(ErrorKind::MultipleDrivers,
                  "signal " + signal + " has more than one driver (" + by + ")", signal);
  };
  for (const std::string &pi : n.primary_inputs)
    claim(pi, "input declaration");

  std::set<std::string> ids;
  for (const Gate &g : n.gates) {
    if (!is_valid_identifier(g.id))
      throw Error(ErrorKind::ValidationError, "invalid gate id '" + g.id + "'", g.id);
    if (!ids.insert(g.id).second)
      throw Error(ErrorKind::ValidationError, "duplicate gate id " + g.id, g.id);
    claim(g.output, "gate " + g.id);
  }

  for (const Gate &g : n.gates) {
    for (const std::string *pin : {&g.input_a, &g.input_b})
      if (!drivers.contains(*pin))
        throw Error(ErrorKind::UndeclaredSignal,
                    "gate " + g.id + " reads undeclared signal " + *pin, *pin);
    if (g.input_a == g.input_b)
      throw Error(ErrorKind::ValidationError,
                  "gate " + g.id + " has both pins on signal " + g.input_a, g.id);
    for (const auto &[name, value] : g.params) {
      if (!is_valid_identifier(name))
        throw Error(ErrorKind::ValidationError, "invalid parameter name " + name, name);
      if (value.is_constant() && value.value() <= 0)
        throw Error(ErrorKind::ValidationError,
                    "gate " + g.id + ": parameter " + name + " must be > 0", name);
    }
  }

  for (const std::string &po : n.primary_outputs)
    if (!drivers.contains(po))
      throw Error(ErrorKind::UndeclaredSignal, "output " + po + " is never driven", po);
}

namespace {

[[noreturn]] void parse_fail(int line, const std::string &what) {
  throw Error(ErrorKind::ParseError, what, {}, line);
}

std::string_view pin_value(std::string_view token, std::string_view key, int line) {
  if (token.size() <= key.size() || token.substr(0, key.size()) != key)
    parse_fail(line, "expected " + std::string(key) + "<signal>, got '" +
                         std::string(token) + "'");
  return token.substr(key.size());
}

template <typename Fn> auto at_line(int line, Fn &&fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error &e) {
    if (e.line() != 0)
      throw;
    throw Error(e.kind(), e.what(), e.subject(), line);
  }
}

Gate parse_gate_line(std::string_view line, int line_no) {
  // gate <id> <type> A=<sig> B=<sig> Y=<sig> [param <name>=<expr>]...
  std::vector<std::string_view> words = text::split_ws(line);
  if (words.size() < 6)
    parse_fail(line_no, "expected 'gate <id> <type> A=<sig> B=<sig> Y=<sig>'");
  Gate g;
  g.id = std::string(words[1]);
  auto type = parse_gate_type(words[2]);
  if (!type)
    parse_fail(line_no, "unknown gate type '" + std::string(words[2]) + "'");
  g.type = *type;
  g.input_a = std::string(pin_value(words[3], "A=", line_no));
  g.input_b = std::string(pin_value(words[4], "B=", line_no));
  g.output = std::string(pin_value(words[5], "Y=", line_no));

  // Parameter values may contain spaces; each runs up to the next `param`.
  std::size_t consumed = line.find(words[5]) + words[5].size();
  std::string_view rest = text::trim(line.substr(consumed));
  while (!rest.empty()) {
    if (rest.substr(0, 6) != "param " && rest.substr(0, 6) != "param\t")
      parse_fail(line_no, "expected 'param <name>=<expr>'");
    rest = text::trim(rest.substr(6));
    std::size_t next = rest.find(" param ");
    std::string_view item = text::trim(rest.substr(0, next));
    rest = next == std::string_view::npos ? std::string_view{} : text::trim(rest.substr(next));
    auto eq = item.find('=');
    if (eq == std::string_view::npos)
      parse_fail(line_no, "expected 'param <name>=<expr>'");
    std::string name(text::trim(item.substr(0, eq)));
    if (!is_valid_identifier(name))
      parse_fail(line_no, "invalid parameter name '" + name + "'");
    Expr value = at_line(line_no, [&] { return parse_expr(item.substr(eq + 1)); });
    if (!g.params.emplace(name, value).second)
      parse_fail(line_no, "parameter " + name + " bound twice");
  }
  return g;
}

} // namespace

Netlist parse_netlist(std::string_view source) {
  Netlist n;
  int line_no = 0;
  for (std::string_view raw : text::lines(source)) {
    ++line_no;
    std::string_view line = text::trim(text::strip_comment(raw));
    if (line.empty())
      continue;
    std::vector<std::string_view> words = text::split_ws(line);
    std::string_view kw = words.front();
    if (kw == "input" || kw == "output") {
      if (words.size() < 2)
        parse_fail(line_no, "expected '" + std::string(kw) + " <name>...'");
      auto &list = kw == "input" ? n.primary_inputs : n.primary_outputs;
      for (std::size_t i = 1; i < words.size(); ++i)
        list.emplace_back(words[i]);
    } else if (kw == "params") {
      if (words.size() != 2 || (words[1] != "shared" && words[1] != "per-gate"))
        parse_fail(line_no, "expected 'params shared|per-gate'");
      n.param_naming = words[1] == "shared" ? ParamNaming::Shared : ParamNaming::PerGate;
    } else if (kw == "gate") {
      n.gates.push_back(parse_gate_line(line, line_no));
    } else {
      parse_fail(line_no, "unknown directive '" + std::string(kw) + "'");
    }
  }
  validate(n);
  return n;
}

Netlist load_netlist(const std::filesystem::path &path) {
  return parse_netlist(text::read_file(path));
}

Netlist parse_bench(std::string_view source) {
  Netlist n;
  n.param_naming = ParamNaming::PerGate;
  int line_no = 0;
  auto name_of = [](std::string_view raw) {
    std::string s(raw);
    return is_valid_identifier(s) ? s : "n" + s;
  };
  auto args_of = [&](std::string_view s, std::string_view head) {
    auto open = s.find('(');
    auto close = s.rfind(')');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open)
      parse_fail(line_no, "malformed " + std::string(head));
    std::vector<std::string> args;
    std::string_view inner = s.substr(open + 1, close - open - 1);
    std::size_t start = 0;
    while (start <= inner.size()) {
      auto comma = inner.find(',', start);
      std::string_view item = text::trim(inner.substr(start, comma == std::string_view::npos
                                                                   ? std::string_view::npos
                                                                   : comma - start));
      if (!item.empty())
        args.push_back(name_of(item));
      if (comma == std::string_view::npos)
        break;
      start = comma + 1;
    }
    return args;
  };

  for (std::string_view raw : text::lines(source)) {
    ++line_no;
    std::string_view line = text::trim(text::strip_comment(raw));
    if (line.empty())
      continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      std::string upper;
      for (char c : line.substr(0, line.find('(')))
        upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
      auto args = args_of(line, upper);
      if (args.size() != 1)
        parse_fail(line_no, "expected exactly one signal");
      if (text::trim(upper) == "INPUT")
        n.primary_inputs.push_back(args[0]);
      else if (text::trim(upper) == "OUTPUT")
        n.primary_outputs.push_back(args[0]);
      else
        parse_fail(line_no, "unknown statement '" + std::string(line) + "'");
      continue;
    }
    std::string out = name_of(text::trim(line.substr(0, eq)));
    std::string_view rhs = text::trim(line.substr(eq + 1));
    std::string fn;
    for (char c : rhs.substr(0, rhs.find('(')))
      fn.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    fn = std::string(text::trim(fn));
    auto args = args_of(rhs, fn);
    Gate g;
    g.id = out;
    g.output = out;
    if (fn == "NAND")
      g.type = GateType::NAND2;
    else if (fn == "NOR")
      g.type = GateType::NOR2;
    else
      parse_fail(line_no, "unsupported gate " + fn + " (only NAND/NOR)");
    if (args.size() != 2)
      parse_fail(line_no, "only 2-input gates are supported");
    g.input_a = args[0];
    g.input_b = args[1];
    n.gates.push_back(std::move(g));
  }
  validate(n);
  return n;
}

std::string print_netlist(const Netlist &n) {
  std::ostringstream os;
  if (n.param_naming == ParamNaming::PerGate)
    os << "params per-gate\n";
  for (const std::string &pi : n.primary_inputs)
    os << "input " << pi << '\n';
  for (const std::string &po : n.primary_outputs)
    os << "output " << po << '\n';
  for (const Gate &g : n.gates) {
    os << "gate " << g.id << ' ' << to_string(g.type) << " A=" << g.input_a
       << " B=" << g.input_b << " Y=" << g.output;
    for (const auto &[name, value] : g.params)
      os << " param " << name << '=' << value;
    os << '\n';
  }
  return os.str();
}

Topology topology(const Netlist &n) {
  Topology t;
  std::size_t count = n.gates.size();
  t.drivers.resize(count);
  t.fanout.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    for (Pin pin : {Pin::A, Pin::B})
      if (auto d = n.driver_gate(n.gates[i].input(pin)))
        t.drivers[i].push_back(*d);
    std::sort(t.drivers[i].begin(), t.drivers[i].end());
    t.drivers[i].erase(std::unique(t.drivers[i].begin(), t.drivers[i].end()),
                       t.drivers[i].end());
    for (std::size_t d : t.drivers[i])
      t.fanout[d].push_back(i);
  }
  for (auto &f : t.fanout) {
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
  }

  // Tarjan's SCC over driver -> driven edges.
  std::vector<int> index(count, -1), low(count, 0);
  std::vector<bool> on_stack(count, false);
  std::vector<std::size_t> stack;
  int next = 0;
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    index[v] = low[v] = next++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t w : t.fanout[v]) {
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::size_t> comp;
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      t.components.push_back(std::move(comp));
    }
  };
  for (std::size_t v = 0; v < count; ++v)
    if (index[v] < 0)
      visit(v);
  std::sort(t.components.begin(), t.components.end());

  for (const auto &comp : t.components) {
    bool self_loop = comp.size() == 1 &&
                     std::binary_search(t.drivers[comp[0]].begin(),
                                        t.drivers[comp[0]].end(), comp[0]);
    if (comp.size() > 1 || self_loop)
      t.cycles.push_back(comp);
  }

  if (t.cycles.empty()) {
    std::vector<std::optional<std::size_t>> level(count);
    std::function<std::size_t(std::size_t)> depth_of = [&](std::size_t g) -> std::size_t {
      if (level[g])
        return *level[g];
      std::size_t d = 0;
      for (std::size_t p : t.drivers[g])
        d = std::max(d, depth_of(p) + 1);
      level[g] = d;
      return d;
    };
    std::size_t depth = 0;
    for (std::size_t g = 0; g < count; ++g)
      depth = std::max(depth, depth_of(g));
    t.depth = depth;
  }
  return t;
}

} // namespace symta
