#include "symta/engine.hpp"
#include "symta/error.hpp"

#include "oracle.hpp"

#include <doctest.h>

#include <functional>
#include <random>

using namespace symta;
using symta::testing::data_path;

namespace {

struct Fixture {
  Netlist netlist;
  TimingSolution solution;
};

Fixture run(const std::string &ckt, const std::string &sched,
            const ModelLibrary &lib = ModelLibrary::builtin(), bool nonlogical = false) {
  Fixture f;
  f.netlist = load_netlist(data_path("fixtures/" + ckt));
  Schedule s = load_schedule(data_path("fixtures/" + sched), f.netlist);
  f.solution = propagate(f.netlist, attribute_causes(s, f.netlist, {nonlogical}), lib);
  return f;
}

Fixture run_text(const std::string &ckt, const std::string &sched, bool attribute = true) {
  Fixture f;
  f.netlist = parse_netlist(ckt);
  Schedule s = parse_schedule(sched, f.netlist);
  if (attribute)
    s = attribute_causes(s, f.netlist);
  f.solution = propagate(f.netlist, s, ModelLibrary::builtin());
  return f;
}

const GateStep &step_at(const TimingSolution &sol, const std::string &ref) {
  std::size_t e = sol.schedule.require(ref);
  for (const GateStep &s : sol.steps)
    if (s.event == e)
      return s;
  FAIL("no step for " << ref);
  throw std::logic_error("unreachable");
}

ErrorKind kind_of(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.kind();
  }
  return ErrorKind::IoError;
}

const char *kNor = "input a1\ninput a3\noutput o1\ngate g1 NOR2 A=a1 B=a3 Y=o1\n";

} // namespace

TEST_CASE("single NOR walk composition") {
  Fixture f = run("nor_walk.ckt", "nor_walk.sched");
  const TimingSolution &sol = f.solution;
  CHECK(sol.time(0) == Expr::symbol("t0"));
  CHECK(sol.time(2) == Expr::symbol("t1"));
  CHECK(sol.time(sol.schedule.require("o1:1")) == parse_expr("d_a + t0"));

  const GateStep &c = step_at(sol, "a3:1");
  REQUIRE(c.pair.has_value());
  CHECK(to_string(*c.pair) == "(a,c)");
  CHECK(*c.t_expr == parse_expr("t1 - d_a - t0"));
  CHECK(*c.delta_expr == parse_expr("t1 - t0"));
  CHECK(*c.delay ==
        parse_expr("-C2*R_nB*(t1 - d_a - t0 + d_min)/(C1*(R_nA + R_nB)) + d_min"));
  CHECK(*c.formula == parse_expr("-C2*R_nB*(T + d_min)/(C1*(R_nA + R_nB)) + d_min"));
  CHECK_FALSE(c.output_event.has_value());

  const OutputTiming &rise = *sol.outputs[5];
  CHECK(rise.opaque);
  CHECK(rise.cause == 4);
  CHECK(sol.time(5) == parse_expr("d_eg + t3"));
  CHECK(sol.opaque_symbols == std::set<std::string>{"d_eg"});
}

TEST_CASE("explain traces") {
  Fixture f = run("nor_walk.ckt", "nor_walk.sched");
  std::string first = explain(f.solution, f.netlist, 1);
  CHECK(first.find("cold case a: t_o1 = d_a + t0") != std::string::npos);
  CHECK(first.find("cause: a1:1") != std::string::npos);
  std::string second = explain(f.solution, f.netlist, 5);
  CHECK(second.find("no template in the model; opaque symbol d_eg") != std::string::npos);
  CHECK(explain(f.solution, f.netlist, 0).find("given: t0") != std::string::npos);
  std::string c = explain(f.solution, f.netlist, 2);
  CHECK(c.find("pair (a,c)") != std::string::npos);
  CHECK(kind_of([&] { explain(f.solution, f.netlist, 99); }) == ErrorKind::UnknownEvent);
}

TEST_CASE("report formats") {
  Fixture f = run("nor_walk.ckt", "nor_walk.sched");
  std::string report = format_report(f.solution, f.netlist);
  CHECK(report.find("o1:1 falling -> d_a + t0\n") != std::string::npos);
  std::string json = format_json(f.solution, f.netlist);
  CHECK(json.find("\"pair\": \"(e,g)\"") != std::string::npos);
  CHECK(json.find("\"expr\": \"d_a + t0\"") != std::string::npos);
  std::string wave = format_waveform(f.solution, f.netlist);
  CHECK(wave.find("o1") != std::string::npos);
  CHECK(wave.find("\\___") != std::string::npos);
}

TEST_CASE("ring oscillator unrolls recursively") {
  Fixture f = run("ring3.ckt", "ring3.sched");
  const TimingSolution &sol = f.solution;
  std::vector<std::size_t> outputs;
  for (std::size_t i = 0; i < sol.outputs.size(); ++i)
    if (sol.outputs[i])
      outputs.push_back(i);
  REQUIRE(outputs.size() == 10);
  for (std::size_t n = 1; n < outputs.size(); ++n) {
    const Expr &prev = sol.time(outputs[n - 1]);
    const Expr &cur = sol.time(outputs[n]);
    CHECK_MESSAGE(contains(cur, prev), to_string(cur) << " vs " << to_string(prev));
    CHECK(sol.outputs[outputs[n]]->cause == outputs[n - 1]);
  }
  CHECK(sol.opaque_symbols.size() == 7);
}

TEST_CASE("c17 outputs reference only their fan-in cone") {
  Fixture f = run("c17_nor.ckt", "c17.sched");
  const Netlist &n = f.netlist;
  const TimingSolution &sol = f.solution;
  int outputs = 0;
  for (std::size_t g = 0; g < n.gates.size(); ++g) {
    // Brute-force cone: signals reachable backwards from the gate output.
    std::set<std::string> cone{n.gates[g].output};
    std::set<std::string> cone_gates;
    for (bool grown = true; grown;) {
      grown = false;
      for (const Gate &gate : n.gates)
        if (cone.contains(gate.output) && !cone_gates.contains(gate.id)) {
          cone_gates.insert(gate.id);
          cone.insert(gate.input_a);
          cone.insert(gate.input_b);
          grown = true;
        }
    }
    std::set<std::string> allowed = sol.opaque_symbols;
    for (const TransitionEvent &e : sol.schedule.events)
      if (n.is_primary_input(e.signal) && cone.contains(e.signal))
        allowed.merge(free_symbols(*e.time));
    for (const std::string &sym : sol.parameter_symbols)
      for (const std::string &id : cone_gates)
        if (sym.size() > id.size() + 1 && sym.ends_with("_" + id))
          allowed.insert(sym);

    std::size_t first = sol.schedule.require(n.gates[g].output + ":1");
    ++outputs;
    for (const std::string &sym : free_symbols(sol.time(first)))
      CHECK_MESSAGE(allowed.contains(sym), sym << " outside the cone of " << n.gates[g].id);
  }
  CHECK(outputs == 6);
}

TEST_CASE("causal closure: times only need earlier symbols") {
  for (auto [ckt, sched] : {std::pair{"nor_walk.ckt", "nor_walk.sched"},
                            std::pair{"c17_nor.ckt", "c17.sched"},
                            std::pair{"ring3.ckt", "ring3.sched"}}) {
    Fixture f = run(ckt, sched);
    const TimingSolution &sol = f.solution;
    std::mt19937 rng(1);
    NumericBindings full = testing::random_binding(rng, sol);
    for (std::size_t e = 0; e < sol.times.size(); ++e) {
      NumericBindings masked = full;
      for (std::size_t later = e + 1; later < sol.times.size(); ++later) {
        const TransitionEvent &ev = sol.schedule.events[later];
        if (ev.time)
          for (const std::string &s : free_symbols(*ev.time))
            masked.erase(s);
        if (sol.outputs[later] && sol.outputs[later]->opaque)
          for (const std::string &s : free_symbols(sol.outputs[later]->delay))
            masked.erase(s);
      }
      CHECK_NOTHROW(evaluate(sol.time(e), masked));
    }
  }
}

TEST_CASE("nesting: driven gates see the driver's expression") {
  Fixture f = run("c17_nor.ckt", "c17.sched");
  const TimingSolution &sol = f.solution;
  std::size_t o1 = sol.schedule.require("o1:1");
  std::size_t o4 = sol.schedule.require("o4:1");
  const GateStep &at_g4 = step_at(sol, "o1:1");
  Expr t_template = Expr::symbol("X") - Expr::symbol("Y");
  Expr nested = substitute(t_template, Bindings{{"X", sol.time(o1)}, {"Y", sol.time(o4)}});
  CHECK(nested == *at_g4.t_expr);
  std::size_t o4b = sol.schedule.require("o4:2");
  Expr composed =
      substitute(Expr::symbol("X") + sol.outputs[o4b]->delay, Bindings{{"X", sol.time(o1)}});
  CHECK(composed == sol.time(o4b));
}

TEST_CASE("propagation is deterministic") {
  Fixture a = run("c17_nor.ckt", "c17.sched");
  Fixture b = run("c17_nor.ckt", "c17.sched");
  CHECK(a.solution.times == b.solution.times);
  REQUIRE(a.solution.steps.size() == b.solution.steps.size());
  for (std::size_t i = 0; i < a.solution.steps.size(); ++i) {
    CHECK(a.solution.steps[i].delay == b.solution.steps[i].delay);
    CHECK(a.solution.steps[i].t_expr == b.solution.steps[i].t_expr);
  }
  CHECK(a.solution.opaque_symbols == b.solution.opaque_symbols);
}

TEST_CASE("opaque symbols are fresh per use and avoid existing names") {
  Fixture f = run_text(kNor, "init o1=1\na1 rise @ d_eg\no1 fall\na3 rise\na1 fall\na3 fall\n"
                             "o1 rise\na1 rise\no1 fall\na1 fall\no1 rise\n");
  CHECK(f.solution.opaque_symbols.contains("d_eg_2"));
  CHECK_FALSE(f.solution.opaque_symbols.contains("d_eg"));
  CHECK(f.solution.opaque_symbols.contains("d_ga"));
  CHECK(f.solution.opaque_symbols.contains("d_ah"));
}

TEST_CASE("propagation errors") {
  CHECK(kind_of([&] { run_text(kNor, "a1 rise\no1 rise cause=1\n", false); }) ==
        ErrorKind::DirectionMismatch);
  CHECK(kind_of([&] { run_text(kNor, "o1 fall cause=2\na1 rise\n", false); }) ==
        ErrorKind::CausalityViolation);
  CHECK(kind_of([&] { run_text(kNor, "a1 rise\no1 fall\n", false); }) ==
        ErrorKind::NoFeasibleCause);
  ModelLibrary only_nand = ModelLibrary::parse("gate NAND2\nparams d_c\n");
  CHECK(kind_of([&] { run("nor_walk.ckt", "nor_walk.sched", only_nand); }) ==
        ErrorKind::UnknownGateType);
}

TEST_CASE("non-logical transitions get opaque delays") {
  Netlist n = parse_netlist(kNor);
  Schedule s = attribute_causes(
      parse_schedule("a1 rise @ t0\no1 fall\na3 rise @ t1\no1 rise\n", n), n, {true});
  TimingSolution sol = propagate(n, s, ModelLibrary::builtin());
  REQUIRE(sol.outputs[3].has_value());
  CHECK_FALSE(sol.outputs[3]->logical);
  CHECK(sol.outputs[3]->opaque);
  CHECK(sol.time(3) == Expr::symbol("t1") + sol.outputs[3]->delay);
  CHECK(explain(sol, n, 3).find("non-logical") != std::string::npos);
}

TEST_CASE("empty library makes every delay opaque") {
  Fixture f = run("nor_walk.ckt", "nor_walk.sched", ModelLibrary::parse(""));
  CHECK(f.solution.time(1) == parse_expr("d_a_cold + t0"));
  CHECK(f.solution.parameter_symbols.empty());
}

TEST_CASE("property: engine times equal a numeric forward simulation") {
  std::mt19937 rng(2024);
  int instances = 0, consistent = 0;
  for (int round = 0; round < 150; ++round) {
    testing::RandomInstance inst = testing::random_instance(rng);
    const ModelLibrary &lib =
        round % 2 ? testing::rich_test_library() : ModelLibrary::builtin();
    Schedule s = attribute_causes(parse_schedule(inst.schedule_text, inst.netlist),
                                  inst.netlist);
    TimingSolution sol = propagate(inst.netlist, s, lib);
    NumericBindings b = testing::random_binding(rng, sol);
    testing::Simulation sim = testing::simulate(inst.netlist, s, lib, b, sol);
    REQUIRE_MESSAGE(sim.mismatch.empty(), sim.mismatch << "\n" << inst.schedule_text);
    for (std::size_t e = 0; e < sol.times.size(); ++e) {
      Value v = evaluate(sol.time(e), b);
      REQUIRE(is_exact(v));
      CHECK(std::get<Rational>(v) == sim.times[e]);
    }
    std::vector<Rational> engine_steps;
    for (const GateStep &st : sol.steps)
      if (st.delay && !st.opaque)
        engine_steps.push_back(std::get<Rational>(evaluate(*st.delay, b)));
    CHECK(engine_steps == sim.step_delays);
    ++instances;
    if (!testing::first_order_violation(sim.times))
      ++consistent;
  }
  CHECK(instances == 150);
  CHECK(consistent > 5);
}
