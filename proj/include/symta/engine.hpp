#pragma once

#include "symta/expr.hpp"
#include "symta/gate_model.hpp"
#include "symta/netlist.hpp"
#include "symta/schedule.hpp"

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace symta {

/// One input transition arriving at one gate pin.
struct GateStep {
  std::size_t gate = 0;
  std::size_t event = 0;
  Pin pin = Pin::A;
  CaseLabel label = CaseLabel::a;
  InputState before;
  InputState after;
  /// Previous and current case at this gate; empty for the first step.
  std::optional<CasePair> pair;
  /// time(event) - time(previous output event of the gate).
  std::optional<Expr> t_expr;
  /// time(event) - time(previous input step of the gate).
  std::optional<Expr> delta_expr;
  /// Direction the gate output moves towards after this step.
  Direction target = Direction::Falling;
  /// True when the delay comes from a cold entry (no previous output).
  bool cold = false;
  bool opaque = false;
  /// Instantiated delay. Opaque delays only exist for steps that cause an
  /// output event, since each use gets its own symbol.
  std::optional<Expr> delay;
  /// The template with the gate's parameters substituted and T, DELTA
  /// left as symbols; empty when opaque.
  std::optional<Expr> formula;
  /// Output event this step causes, if any.
  std::optional<std::size_t> output_event;
};

struct OutputTiming {
  std::size_t gate = 0;
  std::size_t cause = 0;
  /// Index into TimingSolution::steps of the causing step.
  std::size_t step = 0;
  Expr delay;
  bool opaque = false;
  bool logical = true;
};

struct TimingSolution {
  Schedule schedule;
  /// Occurrence time per event, canonical.
  std::vector<Expr> times;
  /// All gate steps in schedule order.
  std::vector<GateStep> steps;
  /// Per event; set for gate-output events.
  std::vector<std::optional<OutputTiming>> outputs;
  std::vector<std::string> diagnostics;
  /// Opaque delay symbols minted during propagation.
  std::set<std::string> opaque_symbols;
  /// Gate ids of the netlist, indexed like GateStep::gate.
  std::vector<std::string> gate_ids;
  /// Free symbols of the resolved gate parameters of the netlist.
  std::set<std::string> parameter_symbols;

  const Expr &time(std::size_t event) const;
  const GateStep *cause_step(std::size_t event) const;
  /// Every symbol appearing in an event time or an instantiated delay.
  std::set<std::string> free_symbols() const;
};

/// Symbolic propagation in global event order. The schedule must have been
/// through `attribute_causes`. Throws CausalityViolation, DirectionMismatch,
/// UnknownGateType, MissingParameter, NoFeasibleCause.
TimingSolution propagate(const Netlist &netlist, const Schedule &schedule,
                         const ModelLibrary &library);

/// Derivation trace for one event. Throws UnknownEvent.
std::string explain(const TimingSolution &solution, const Netlist &netlist,
                    std::size_t event);

/// One `<event> <signal> <direction> -> <expr>` line per event.
std::string format_report(const TimingSolution &solution, const Netlist &netlist);

/// JSON document: {"events": [{index, event, signal, direction, kind,
/// cause, case, pair, cold, opaque, delay, T, DELTA, expr}], "diagnostics"}.
std::string format_json(const TimingSolution &solution, const Netlist &netlist);

/// ASCII timing diagram, one row per signal, events as columns in order.
std::string format_waveform(const TimingSolution &solution, const Netlist &netlist);

} // namespace symta
