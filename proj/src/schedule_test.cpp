#include "symta/error.hpp"
#include "symta/schedule.hpp"

#include <doctest.h>

#include <random>

using namespace symta;

namespace {

const char *kWalkNetlist = "input a1\ninput a3\noutput o1\ngate g1 NOR2 A=a1 B=a3 Y=o1\n";

const char *kWalkSchedule = R"(init a1=0 a3=0 o1=1
a1 rise @ t0
o1 fall
a3 rise @ t1
a1 fall @ t2
a3 fall @ t3
o1 rise
)";

ErrorKind kind_of(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.kind();
  }
  return ErrorKind::IoError;
}

} // namespace

TEST_CASE("parse the single NOR walk schedule") {
  Netlist n = parse_netlist(kWalkNetlist);
  Schedule s = parse_schedule(kWalkSchedule, n);
  REQUIRE(s.events.size() == 6);
  CHECK(s.events[0].signal == "a1");
  CHECK(s.events[0].direction == Direction::Rising);
  CHECK(*s.events[0].time == Expr::symbol("t0"));
  CHECK_FALSE(s.events[1].time.has_value());
  CHECK(s.events[5].label() == "o1:2");
  CHECK(s.find("a3:2") == 4u);
  CHECK(s.find("#2") == 2u);
  CHECK_FALSE(s.find("a3:3").has_value());
  CHECK(kind_of([&] { s.require("zz:1"); }) == ErrorKind::UnknownEvent);
  CHECK(s.initial_values.at("o1"));
}

TEST_CASE("fresh time symbols and defaults") {
  Netlist n = parse_netlist(kWalkNetlist);
  Schedule s = parse_schedule("a1 rise @ t0 + t1\na3 rise\na1 fall\n", n);
  CHECK(*s.events[1].time == Expr::symbol("t2"));
  CHECK(*s.events[2].time == Expr::symbol("t3"));
  CHECK_FALSE(s.initial_values.at("a1"));
  CHECK(s.initial_values.at("o1"));

  Schedule empty = parse_schedule("# nothing\n", n);
  CHECK(empty.events.empty());
  CHECK(attribute_causes(empty, n).events.empty());

  Schedule implied = parse_schedule("a1 rise\no1 fall\n", n);
  CHECK(implied.initial_values.at("o1"));
}

TEST_CASE("schedule errors") {
  Netlist n = parse_netlist(kWalkNetlist);
  CHECK(kind_of([&] { parse_schedule("a1 rise\na1 rise\n", n); }) ==
        ErrorKind::NonAlternatingDirections);
  CHECK(kind_of([&] { parse_schedule("zz rise\n", n); }) == ErrorKind::UnknownSignal);
  CHECK(kind_of([&] { parse_schedule("a1 up\n", n); }) == ErrorKind::ParseError);
  CHECK(kind_of([&] { parse_schedule("a1 rise @\n", n); }) == ErrorKind::ParseError);
  CHECK(kind_of([&] { parse_schedule("o1 fall @ t5\n", n); }) == ErrorKind::ParseError);
  CHECK(kind_of([&] { parse_schedule("a1 rise\ninit a3=1\n", n); }) == ErrorKind::ParseError);
  CHECK(kind_of([&] { parse_schedule("init a1=2\n", n); }) == ErrorKind::ParseError);
  CHECK(kind_of([&] { parse_schedule("init a1=1\na1 rise\n", n); }) ==
        ErrorKind::InconsistentInitialState);
  CHECK(kind_of([&] { parse_schedule("a1 rise\no1 fall cause=9\n", n); }) ==
        ErrorKind::ParseError);
}

TEST_CASE("cause attribution on the single NOR walk") {
  Netlist n = parse_netlist(kWalkNetlist);
  Schedule s = attribute_causes(parse_schedule(kWalkSchedule, n), n);
  CHECK(s.events[1].cause == 0u);
  CHECK(s.events[5].cause == 4u);
  for (const TransitionEvent &e : s.events)
    if (e.cause)
      CHECK(*e.cause < e.index);

  // Brute-force NOR truth table along the input trajectory: the output may
  // rise only once both inputs are low, which first happens at event 4.
  bool a1 = false, a3 = false;
  std::optional<std::size_t> first_both_low;
  for (const TransitionEvent &e : s.events) {
    if (e.signal == "a1")
      a1 = e.direction == Direction::Rising;
    if (e.signal == "a3")
      a3 = e.direction == Direction::Rising;
    if (e.index > 1 && !a1 && !a3 && !first_both_low)
      first_both_low = e.index;
  }
  CHECK(first_both_low == 4u);
}

TEST_CASE("attribution failures and overrides") {
  Netlist n = parse_netlist(kWalkNetlist);
  CHECK(kind_of([&] { attribute_causes(parse_schedule("o1 fall\n", n), n); }) ==
        ErrorKind::NoFeasibleCause);
  CHECK(kind_of([&] {
          attribute_causes(parse_schedule("a1 rise\no1 fall\na3 rise\no1 rise\n", n), n);
        }) == ErrorKind::NoFeasibleCause);
  CHECK(kind_of([&] {
          attribute_causes(parse_schedule("o1 fall cause=2\na1 rise\n", n), n);
        }) == ErrorKind::CausalityViolation);

  Schedule explicit_cause =
      attribute_causes(parse_schedule("a3 rise\na1 rise\no1 fall cause=1\n", n), n);
  CHECK(explicit_cause.events[2].cause == 0u);
  CHECK(explicit_cause.events[2].explicit_cause);
  Schedule automatic = attribute_causes(parse_schedule("a3 rise\na1 rise\no1 fall\n", n), n);
  CHECK(automatic.events[2].cause == 0u);

  Schedule nonlogical = attribute_causes(
      parse_schedule("a1 rise\no1 fall\na3 rise\no1 rise\n", n), n, {true});
  CHECK(nonlogical.events[3].cause == 2u);
  CHECK_FALSE(nonlogical.events[3].logical);
  CHECK(nonlogical.events[1].logical);
}

TEST_CASE("case sequences") {
  Netlist n = parse_netlist(kWalkNetlist);
  Schedule s = parse_schedule(kWalkSchedule, n);
  auto steps = derive_case_sequence(s, n, 0);
  REQUIRE(steps.size() == 4);
  CHECK(steps[0].label == CaseLabel::a);
  CHECK(steps[1].label == CaseLabel::c);
  CHECK(steps[2].label == CaseLabel::e);
  CHECK(steps[3].label == CaseLabel::g);
  auto pairs = case_pairs(steps);
  REQUIRE(pairs.size() == 3);
  CHECK(to_string(pairs[0]) == "(a,c)");
  CHECK(to_string(pairs[1]) == "(c,e)");
  CHECK(to_string(pairs[2]) == "(e,g)");

  Schedule one = parse_schedule("a1 rise\n", n);
  auto single = derive_case_sequence(one, n, 0);
  REQUIRE(single.size() == 1);
  CHECK(single[0].label == CaseLabel::a);
  CHECK(case_pairs(single).empty());

  Schedule none = parse_schedule("", n);
  CHECK(derive_case_sequence(none, n, 0).empty());
}

TEST_CASE("property: case walks reproduce the input trajectory") {
  Netlist n = parse_netlist(
      "input p\ninput q\ninput r\ngate g NOR2 A=p B=q Y=y\ngate h NAND2 A=q B=r Y=z\n");
  std::mt19937 rng(13);
  for (int round = 0; round < 300; ++round) {
    std::map<std::string, bool> level;
    std::string text = "init";
    for (const char *s : {"p", "q", "r"}) {
      level[s] = rng() % 2;
      text += std::string(" ") + s + "=" + (level[s] ? "1" : "0");
    }
    text += "\n";
    std::vector<std::string> raw;
    std::size_t count = rng() % 9;
    for (std::size_t k = 0; k < count; ++k) {
      std::string s = std::string(1, "pqr"[rng() % 3]);
      level[s] = !level[s];
      raw.push_back(s);
      text += s + (level[s] ? " rise\n" : " fall\n");
    }
    Schedule sched = parse_schedule(text, n);
    for (std::size_t g = 0; g < 2; ++g) {
      const Gate &gate = n.gates[g];
      InputState expected{sched.initial_values.at(gate.input_a),
                          sched.initial_values.at(gate.input_b)};
      std::vector<InputState> trajectory{expected};
      for (const std::string &s : raw) {
        if (s == gate.input_a)
          expected.a = !expected.a;
        else if (s == gate.input_b)
          expected.b = !expected.b;
        else
          continue;
        trajectory.push_back(expected);
      }
      auto steps = derive_case_sequence(sched, n, g);
      REQUIRE(steps.size() + 1 == trajectory.size());
      InputState walk = trajectory.front();
      for (std::size_t k = 0; k < steps.size(); ++k) {
        const CaseEdge &edge = CaseTable::standard().edge(steps[k].label);
        CHECK(edge.source == walk);
        walk = edge.target();
        CHECK(walk == trajectory[k + 1]);
      }
      for (const CasePair &p : case_pairs(steps))
        CHECK(chains(p));
    }
  }
}

TEST_CASE("property: attribution is deterministic and causal") {
  Netlist n = parse_netlist(
      "input p\ninput q\ninput r\ngate g NOR2 A=p B=q Y=y\ngate h C2 A=y B=r Y=z\n");
  std::mt19937 rng(23);
  int attributed = 0;
  for (int round = 0; round < 300; ++round) {
    std::map<std::string, bool> level{{"p", false}, {"q", false}, {"r", false},
                                      {"y", true}, {"z", false}};
    std::string text;
    for (int k = 0; k < 8; ++k) {
      std::string s = std::string(1, "pqryz"[rng() % 5]);
      level[s] = !level[s];
      text += s + (level[s] ? " rise\n" : " fall\n");
    }
    text = "init p=0 q=0 r=0 y=1 z=0\n" + text;
    Schedule sched;
    try {
      sched = parse_schedule(text, n);
    } catch (const Error &) {
      continue;
    }
    try {
      Schedule a = attribute_causes(sched, n);
      Schedule b = attribute_causes(sched, n);
      ++attributed;
      for (std::size_t i = 0; i < a.events.size(); ++i) {
        CHECK(a.events[i].cause == b.events[i].cause);
        if (n.driver_gate(a.events[i].signal)) {
          REQUIRE(a.events[i].cause.has_value());
          CHECK(*a.events[i].cause < i);
        }
      }
    } catch (const Error &e) {
      CHECK((e.kind() == ErrorKind::NoFeasibleCause ||
             e.kind() == ErrorKind::InconsistentInitialState));
    }
  }
  CHECK(attributed > 5);
}
