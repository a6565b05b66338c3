#pragma once

#include "symta/expr.hpp"
#include "symta/gate_model.hpp"
#include "symta/netlist.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace symta {

struct TransitionEvent {
  /// Position in the global order (0-based).
  std::size_t index = 0;
  std::string signal;
  Direction direction = Direction::Rising;
  /// Occurrence time for primary-input events; gate outputs get theirs
  /// from the engine.
  std::optional<Expr> time;
  /// Causing event (gate-output events only, after attribution).
  std::optional<std::size_t> cause;
  bool explicit_cause = false;
  /// False when accepted only because non-logical transitions are allowed.
  bool logical = true;
  /// Source line in the schedule file; 0 for programmatic schedules.
  int line = 0;
  /// 1-based count of this event among the events of its signal.
  std::size_t occurrence = 1;

  /// `<signal>:<occurrence>`, the reference syntax used by the CLI.
  std::string label() const;
};

struct Schedule {
  std::vector<TransitionEvent> events;
  /// Resolved initial level of every netlist signal.
  std::map<std::string, bool, std::less<>> initial_values;

  /// Resolves `<signal>:<k>` or `#<index>`.
  std::optional<std::size_t> find(std::string_view ref) const;
  /// Like `find`, throws UnknownEvent.
  std::size_t require(std::string_view ref) const;
};

struct ScheduleOptions {
  /// Accept output events no input step explains; they get opaque delays.
  bool allow_nonlogical = false;
};

/// File format, one event per line in global order:
///   init <signal>=<0|1>                (before the first event)
///   <signal> <rise|fall> [@ <expr>] [cause=<line>]
/// Primary-input events without `@` get fresh symbols t0, t1, ...
/// Unspecified initial levels: primary inputs 0; gate outputs the level
/// implied by their first event, else the gate's settled value.
/// Throws ParseError, UnknownSignal, NonAlternatingDirections,
/// InconsistentInitialState.
Schedule parse_schedule(std::string_view text, const Netlist &netlist);
Schedule load_schedule(const std::filesystem::path &path, const Netlist &netlist);

/// Fills in the cause of every gate-output event: the most recent input
/// step of the gate, after its previous output event, at which the gate's
/// target level moves to the event's level. Explicit causes are checked.
/// Throws NoFeasibleCause or CausalityViolation.
Schedule attribute_causes(Schedule schedule, const Netlist &netlist,
                          const ScheduleOptions &options = {});

struct CaseStep {
  CaseLabel label = CaseLabel::a;
  std::size_t event = 0;
  Pin pin = Pin::A;
  InputState before;
};

/// Walk of one gate's input-state graph in schedule order. Throws
/// InconsistentInitialState when an event does not change its pin.
std::vector<CaseStep> derive_case_sequence(const Schedule &schedule,
                                           const Netlist &netlist,
                                           std::size_t gate,
                                           const CaseTable &table = CaseTable::standard());

std::vector<CasePair> case_pairs(const std::vector<CaseStep> &steps);

} // namespace symta
