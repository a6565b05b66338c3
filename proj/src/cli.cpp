#include "symta/cli.hpp"

#include "symta/analysis.hpp"
#include "symta/engine.hpp"
#include "symta/error.hpp"
#include "symta/gate_model.hpp"
#include "symta/netlist.hpp"
#include "symta/schedule.hpp"
#include "text_util.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <ostream>
#include <sstream>

namespace symta {

namespace {

struct RunConfig {
  std::string netlist_path;
  std::string schedule_path;
  std::string model_path;
  std::string format = "text";
  std::string out_path;
  bool bench = false;
  bool allow_nonlogical = false;
  bool strict_physical = false;
  bool text_waveform = false;
  std::vector<std::string> explain;
  std::string binding_path;
  std::string event;
  std::string wrt;
  std::string grid;
  std::string quantity = "time";
  std::string gate;
  std::vector<std::string> free;
};

struct Loaded {
  Netlist netlist;
  ModelLibrary library;
  TimingSolution solution;
};

Loaded load(const RunConfig &cfg) {
  Loaded l;
  l.library = cfg.model_path.empty() ? ModelLibrary::builtin()
                                     : ModelLibrary::load_file(cfg.model_path);
  bool bench = cfg.bench || std::filesystem::path(cfg.netlist_path).extension() == ".bench";
  l.netlist = bench ? parse_bench(text::read_file(cfg.netlist_path))
                    : load_netlist(cfg.netlist_path);
  Schedule s = load_schedule(cfg.schedule_path, l.netlist);
  s = attribute_causes(std::move(s), l.netlist, {cfg.allow_nonlogical});
  l.solution = propagate(l.netlist, s, l.library);
  return l;
}

void emit(const RunConfig &cfg, const std::string &text, std::ostream &out) {
  if (cfg.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.out_path, std::ios::binary);
  if (!f)
    throw Error(ErrorKind::IoError, "cannot write " + cfg.out_path, cfg.out_path);
  f << text;
}

int cmd_analyze(const RunConfig &cfg, std::ostream &out, std::ostream &) {
  Loaded l = load(cfg);
  std::string text;
  if (cfg.format == "json") {
    text = format_json(l.solution, l.netlist);
  } else {
    text = format_report(l.solution, l.netlist);
    for (const std::string &ref : cfg.explain)
      text += "\n" + explain(l.solution, l.netlist, l.solution.schedule.require(ref));
    if (cfg.text_waveform)
      text += "\n" + format_waveform(l.solution, l.netlist);
  }
  emit(cfg, text, out);
  return 0;
}

int cmd_check(const RunConfig &cfg, std::ostream &out, std::ostream &err) {
  Loaded l = load(cfg);
  NumericBindings binding = load_binding(cfg.binding_path);
  ConsistencyReport r = check_consistency(l.solution, binding, {cfg.strict_physical});
  const auto &events = l.solution.schedule.events;
  for (const ValidityWarning &w : r.warnings)
    err << "warning: " << w.message << "\n";

  std::ostringstream os;
  if (cfg.format == "json") {
    nlohmann::json j;
    j["verdict"] = r.consistent ? "consistent" : "violated";
    if (r.first_violation) {
      const OrderViolation &v = *r.first_violation;
      j["first_violation"] = {{"earlier", events[v.earlier].label()},
                              {"later", events[v.later].label()},
                              {"earlier_time", to_string(v.earlier_time)},
                              {"later_time", to_string(v.later_time)},
                              {"tie", v.tie}};
    }
    nlohmann::json warnings = nlohmann::json::array();
    for (const ValidityWarning &w : r.warnings)
      warnings.push_back(w.message);
    j["validity_warnings"] = warnings;
    nlohmann::json times = nlohmann::json::object();
    for (std::size_t i = 0; i < r.times.size(); ++i)
      times[events[i].label()] = to_string(r.times[i]);
    j["times"] = times;
    os << j.dump(2) << "\n";
  } else {
    for (std::size_t i = 0; i < r.times.size(); ++i)
      os << events[i].label() << " = " << to_string(r.times[i]) << "\n";
    if (r.consistent) {
      os << "consistent\n";
    } else {
      const OrderViolation &v = *r.first_violation;
      os << "violated: " << events[v.earlier].label() << " at " << to_string(v.earlier_time)
         << (v.tie ? " ties with " : " is not before ") << events[v.later].label() << " at "
         << to_string(v.later_time) << "\n";
    }
  }
  emit(cfg, os.str(), out);
  return r.consistent ? 0 : 1;
}

int cmd_sens(const RunConfig &cfg, std::ostream &out, std::ostream &) {
  Loaded l = load(cfg);
  Expr d = sensitivity(l.solution, l.solution.schedule.require(cfg.event), cfg.wrt);
  std::string text = to_string(d) + "\n";
  if (!cfg.binding_path.empty())
    text += to_string(evaluate(d, load_binding(cfg.binding_path))) + "\n";
  emit(cfg, text, out);
  return 0;
}

Expr sweep_quantity(const RunConfig &cfg, const Loaded &l) {
  std::size_t event = l.solution.schedule.require(cfg.event);
  if (cfg.quantity == "time")
    return l.solution.time(event);
  if (cfg.quantity != "delay")
    throw Error(ErrorKind::ValidationError, "--quantity must be time or delay", cfg.quantity);
  std::vector<const GateStep *> candidates;
  for (const GateStep &s : l.solution.steps)
    if (s.event == event &&
        (cfg.gate.empty() || l.netlist.gates[s.gate].id == cfg.gate))
      candidates.push_back(&s);
  if (candidates.size() != 1)
    throw Error(ErrorKind::ValidationError,
                cfg.event + " reaches " + std::to_string(candidates.size()) +
                    " gate inputs; select one with --gate",
                cfg.event);
  if (!candidates.front()->formula)
    throw Error(ErrorKind::ValidationError,
                "the delay at " + cfg.event + " is opaque and has no formula", cfg.event);
  return *candidates.front()->formula;
}

int cmd_sweep(const RunConfig &cfg, std::ostream &out, std::ostream &) {
  Loaded l = load(cfg);
  Expr e = sweep_quantity(cfg, l);
  NumericBindings base;
  if (!cfg.binding_path.empty())
    base = load_binding(cfg.binding_path);
  std::vector<SweepRow> rows = sweep(e, cfg.wrt, parse_grid(cfg.grid), base);
  std::string text;
  if (cfg.format == "text") {
    std::ostringstream os;
    for (const SweepRow &r : rows)
      os << cfg.wrt << " = " << r.value.get_str() << ": " << to_string(r.result) << "\n";
    text = os.str();
  } else {
    text = sweep_csv(rows);
  }
  emit(cfg, text, out);
  return 0;
}

int cmd_export_smt(const RunConfig &cfg, std::ostream &out, std::ostream &) {
  Loaded l = load(cfg);
  NumericBindings binding;
  if (!cfg.binding_path.empty())
    binding = load_binding(cfg.binding_path);
  std::vector<OrderingConstraint> constraints =
      solve_ordering_region(l.solution, cfg.free, binding);
  NumericBindings fixed;
  if (cfg.free.empty())
    fixed = binding;
  std::set<std::string> symbols = l.solution.free_symbols();
  std::vector<std::string> decls(symbols.begin(), symbols.end());
  emit(cfg, export_smt(constraints, decls, fixed), out);
  return 0;
}

void add_common(CLI::App *cmd, RunConfig &cfg) {
  cmd->add_option("netlist", cfg.netlist_path, "Netlist file (.ckt or .bench)")->required();
  cmd->add_option("schedule", cfg.schedule_path, "Transition schedule file")->required();
  cmd->add_option("--model", cfg.model_path, "Delay model library (default: built-in)");
  cmd->add_option("--out", cfg.out_path, "Write the result to this file");
  cmd->add_flag("--bench", cfg.bench, "Read the netlist as ISCAS .bench");
  cmd->add_flag("--allow-nonlogical", cfg.allow_nonlogical,
                "Accept output transitions no input transition explains");
}

} // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  RunConfig cfg;
  CLI::App app{"Symbolic gate-level timing analysis"};
  app.name("symta");
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", "symta 1.0");

  std::map<CLI::App *, std::function<int(const RunConfig &, std::ostream &, std::ostream &)>>
      handlers;

  auto *analyze = app.add_subcommand("analyze", "Print the symbolic time of every event");
  add_common(analyze, cfg);
  analyze->add_option("--format", cfg.format, "text or json")
      ->check(CLI::IsMember({"text", "json", "structured"}));
  analyze->add_option("--explain", cfg.explain, "Derivation trace for an event (signal:k)");
  analyze->add_flag("--text-waveform", cfg.text_waveform, "Append an ASCII timing diagram");
  handlers[analyze] = cmd_analyze;

  auto *check = app.add_subcommand("check", "Check the schedule order under a binding");
  add_common(check, cfg);
  check->add_option("--binding", cfg.binding_path, "Numeric binding file")->required();
  check->add_option("--format", cfg.format, "text or json")
      ->check(CLI::IsMember({"text", "json", "structured"}));
  check->add_flag("--strict-physical", cfg.strict_physical,
                  "Reject non-positive gate parameters");
  handlers[check] = cmd_check;

  auto *sens = app.add_subcommand("sens", "Derivative of an event time");
  add_common(sens, cfg);
  sens->add_option("--event", cfg.event, "Event (signal:k)")->required();
  sens->add_option("--wrt", cfg.wrt, "Symbol")->required();
  sens->add_option("--binding", cfg.binding_path, "Also evaluate under this binding");
  handlers[sens] = cmd_sens;

  auto *sweep_cmd = app.add_subcommand("sweep", "Evaluate a quantity over a grid");
  add_common(sweep_cmd, cfg);
  sweep_cmd->add_option("--event", cfg.event, "Event (signal:k)")->required();
  sweep_cmd->add_option("--wrt", cfg.wrt, "Swept symbol")->required();
  sweep_cmd->add_option("--grid", cfg.grid, "v1,v2,... or lo:hi:n")->required();
  sweep_cmd->add_option("--binding", cfg.binding_path, "Values of the other symbols");
  sweep_cmd->add_option("--quantity", cfg.quantity,
                        "time (event time) or delay (delay formula in T and DELTA)")
      ->check(CLI::IsMember({"time", "delay"}));
  sweep_cmd->add_option("--gate", cfg.gate, "Gate receiving the event, for --quantity delay");
  sweep_cmd->add_option("--format", cfg.format, "csv or text")
      ->check(CLI::IsMember({"csv", "text"}));
  cfg.format = "csv";
  handlers[sweep_cmd] = cmd_sweep;

  auto *smt = app.add_subcommand("export-smt", "Write ordering constraints as SMT-LIB2");
  add_common(smt, cfg);
  smt->add_option("--binding", cfg.binding_path,
                  "Fix symbols to these values (all, or those not listed in --free)");
  smt->add_option("--free", cfg.free, "Symbols left free")->delimiter(',');
  handlers[smt] = cmd_export_smt;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  CLI::App *chosen = app.get_subcommands().front();
  if (chosen != sweep_cmd && cfg.format == "csv")
    cfg.format = "text";
  if (cfg.format == "structured")
    cfg.format = "json";
  try {
    return handlers.at(chosen)(cfg, out, err);
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

} // namespace symta
