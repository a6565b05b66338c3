#pragma once

// Independent reference implementations used by the property and
// acceptance tests. Nothing here calls the engine's propagation code: the
// simulator walks the event list with plain rationals, its own case table
// and its own gate functions, and only borrows template bodies from the
// model library.

#include "symta/engine.hpp"
#include "symta/gate_model.hpp"
#include "symta/netlist.hpp"
#include "symta/schedule.hpp"

#include <optional>
#include <random>
#include <string>
#include <vector>

namespace symta::testing {

/// Case label of toggling `pin` in state (a,b), written out by hand.
CaseLabel reference_case(bool a, bool b, Pin pin);

/// Boolean function of each gate type, written out by hand.
bool reference_level(GateType type, bool a, bool b, bool out);

struct SimulatedOutput {
  std::size_t cause = 0;
  bool opaque = false;
  Rational delay;
};

struct Simulation {
  std::vector<Rational> times;
  /// Per event; set for gate-output events.
  std::vector<std::optional<SimulatedOutput>> outputs;
  /// Delays of every gate step with a template, in schedule order.
  std::vector<Rational> step_delays;
  /// Explanation of the first disagreement with the engine, if any.
  std::string mismatch;
};

/// Numeric forward simulation of `schedule` (already parsed, causes not
/// needed). Opaque delays take the value `binding` gives the symbol the
/// engine minted for that event, after checking the engine also found no
/// template there.
Simulation simulate(const Netlist &netlist, const Schedule &schedule,
                    const ModelLibrary &library, const NumericBindings &binding,
                    const TimingSolution &engine);

/// Brute-force consecutive comparison of numeric times.
std::optional<std::size_t> first_order_violation(const std::vector<Rational> &times);

struct RandomInstance {
  Netlist netlist;
  std::string schedule_text;
};

/// Acyclic netlist of 1..max_gates gates of random types, and a schedule of
/// 1..max_events events that is logically valid under strict attribution.
RandomInstance random_instance(std::mt19937 &rng, std::size_t max_gates = 4,
                               std::size_t max_events = 8);

/// Positive random rational in [1/den_max, num_max].
Rational random_positive(std::mt19937 &rng, long num_max = 20, long den_max = 7);

/// Random positive value for every free symbol of the solution.
NumericBindings random_binding(std::mt19937 &rng, const TimingSolution &solution);

/// Model library with extra invented templates over T and DELTA for every
/// gate type, used to exercise pair lookups beyond the shipped model.
const ModelLibrary &rich_test_library();

/// Absolute path of a bundled data file.
std::string data_path(const std::string &relative);

} // namespace symta::testing
