#include "symta/schedule.hpp"

#include "symta/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace symta {

std::string TransitionEvent::label() const {
  return signal + ":" + std::to_string(occurrence);
}

std::optional<std::size_t> Schedule::find(std::string_view ref) const {
  auto parse_number = [](std::string_view s) -> std::optional<std::size_t> {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
      return std::nullopt;
    return v;
  };
  if (!ref.empty() && ref.front() == '#') {
    auto idx = parse_number(ref.substr(1));
    if (idx && *idx < events.size())
      return idx;
    return std::nullopt;
  }
  auto colon = ref.rfind(':');
  if (colon == std::string_view::npos)
    return std::nullopt;
  std::string_view signal = ref.substr(0, colon);
  auto k = parse_number(ref.substr(colon + 1));
  if (!k)
    return std::nullopt;
  for (const TransitionEvent &e : events)
    if (e.signal == signal && e.occurrence == *k)
      return e.index;
  return std::nullopt;
}

std::size_t Schedule::require(std::string_view ref) const {
  if (auto idx = find(ref))
    return *idx;
  throw Error(ErrorKind::UnknownEvent, "no event '" + std::string(ref) + "' in schedule",
              std::string(ref));
}

namespace {

[[noreturn]] void parse_fail(int line, const std::string &what) {
  throw Error(ErrorKind::ParseError, what, {}, line);
}

struct RawEvent {
  TransitionEvent event;
  std::optional<int> cause_line;
};

void resolve_initial_values(Schedule &s, const Netlist &netlist,
                            const std::map<std::string, std::pair<bool, int>> &explicit_init) {
  std::map<std::string, Direction> first_event;
  for (const TransitionEvent &e : s.events)
    first_event.try_emplace(e.signal, e.direction);

  for (const auto &[signal, value_line] : explicit_init) {
    auto [value, line] = value_line;
    if (auto it = first_event.find(signal); it != first_event.end() &&
                                            level_after(it->second) == value)
      throw Error(ErrorKind::InconsistentInitialState,
                  "signal " + signal + " starts at " + (value ? "1" : "0") +
                      " but its first event is " + std::string(to_string(it->second)),
                  signal, line);
    s.initial_values[signal] = value;
  }

  for (const std::string &pi : netlist.primary_inputs)
    s.initial_values.try_emplace(pi, false);

  std::vector<std::size_t> unresolved;
  for (std::size_t i = 0; i < netlist.gates.size(); ++i) {
    const std::string &out = netlist.gates[i].output;
    if (s.initial_values.contains(out))
      continue;
    if (auto it = first_event.find(out); it != first_event.end())
      s.initial_values[out] = !level_after(it->second);
    else
      unresolved.push_back(i);
  }

  // Remaining outputs settle to their gate function, as far as their inputs
  // are known; anything left inside a loop starts at 0.
  bool progress = true;
  while (progress && !unresolved.empty()) {
    progress = false;
    for (auto it = unresolved.begin(); it != unresolved.end();) {
      const Gate &g = netlist.gates[*it];
      auto a = s.initial_values.find(g.input_a);
      auto b = s.initial_values.find(g.input_b);
      if (a != s.initial_values.end() && b != s.initial_values.end()) {
        s.initial_values[g.output] = gate_target_level(g.type, {a->second, b->second}, false);
        it = unresolved.erase(it);
        progress = true;
      } else {
        ++it;
      }
    }
  }
  for (std::size_t i : unresolved)
    s.initial_values[netlist.gates[i].output] = false;
}

} // namespace

Schedule parse_schedule(std::string_view source, const Netlist &netlist) {
  Schedule s;
  std::map<std::string, std::pair<bool, int>> explicit_init;
  std::vector<RawEvent> raw;
  std::map<int, std::size_t> event_at_line;
  std::set<std::string> used_symbols;
  int line_no = 0;

  auto require_signal = [&](std::string_view name, int line) {
    if (!netlist.has_signal(name))
      throw Error(ErrorKind::UnknownSignal, "unknown signal " + std::string(name),
                  std::string(name), line);
  };

  for (std::string_view rawline : text::lines(source)) {
    ++line_no;
    std::string_view line = text::trim(text::strip_comment(rawline));
    if (line.empty())
      continue;
    std::vector<std::string_view> words = text::split_ws(line);

    if (words.front() == "init") {
      if (!raw.empty())
        parse_fail(line_no, "init lines must precede the first event");
      for (std::size_t i = 1; i < words.size(); ++i) {
        auto eq = words[i].find('=');
        if (eq == std::string_view::npos)
          parse_fail(line_no, "expected 'init <signal>=<0|1>'");
        std::string_view name = words[i].substr(0, eq);
        std::string_view value = words[i].substr(eq + 1);
        if (value != "0" && value != "1")
          parse_fail(line_no, "initial value must be 0 or 1");
        require_signal(name, line_no);
        explicit_init[std::string(name)] = {value == "1", line_no};
      }
      if (words.size() < 2)
        parse_fail(line_no, "expected 'init <signal>=<0|1>'");
      continue;
    }

    if (words.size() < 2)
      parse_fail(line_no, "expected '<signal> <rise|fall> [@ <expr>] [cause=<line>]'");
    RawEvent ev;
    ev.event.signal = std::string(words[0]);
    ev.event.line = line_no;
    require_signal(ev.event.signal, line_no);
    auto dir = parse_direction(words[1]);
    if (!dir)
      parse_fail(line_no, "expected rise or fall, got '" + std::string(words[1]) + "'");
    ev.event.direction = *dir;

    std::size_t after_dir = line.find(words[1], words[0].size()) + words[1].size();
    std::string_view rest = text::trim(line.substr(after_dir));
    if (auto c = rest.rfind("cause="); c != std::string_view::npos) {
      std::string_view num = text::trim(rest.substr(c + 6));
      int cause_line = 0;
      auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), cause_line);
      if (ec != std::errc() || ptr != num.data() + num.size())
        parse_fail(line_no, "cause= expects a line number");
      ev.cause_line = cause_line;
      ev.event.explicit_cause = true;
      rest = text::trim(rest.substr(0, c));
    }
    if (!rest.empty()) {
      if (rest.front() != '@')
        parse_fail(line_no, "unexpected '" + std::string(rest) + "'");
      std::string_view time_text = text::trim(rest.substr(1));
      if (time_text.empty())
        parse_fail(line_no, "missing time after '@'");
      try {
        ev.event.time = parse_expr(time_text);
      } catch (const Error &e) {
        throw Error(e.kind(), e.what(), e.subject(), line_no);
      }
      for (const std::string &sym : free_symbols(*ev.event.time))
        used_symbols.insert(sym);
    }

    bool is_input = netlist.is_primary_input(ev.event.signal);
    if (!is_input && ev.event.time)
      parse_fail(line_no, "gate output " + ev.event.signal +
                              " cannot be given a time; it is computed");
    if (is_input && ev.cause_line)
      parse_fail(line_no, "primary input " + ev.event.signal + " cannot have a cause");

    ev.event.index = raw.size();
    event_at_line[line_no] = ev.event.index;
    raw.push_back(std::move(ev));
  }

  std::map<std::string, std::pair<Direction, std::size_t>> last;
  std::size_t fresh = 0;
  for (RawEvent &ev : raw) {
    TransitionEvent &e = ev.event;
    auto it = last.find(e.signal);
    if (it != last.end()) {
      if (it->second.first == e.direction)
        throw Error(ErrorKind::NonAlternatingDirections,
                    "two consecutive " + std::string(to_string(e.direction)) +
                        " transitions on " + e.signal,
                    e.signal, e.line);
      e.occurrence = it->second.second + 1;
    }
    last[e.signal] = {e.direction, e.occurrence};

    if (netlist.is_primary_input(e.signal) && !e.time) {
      std::string name;
      do {
        name = "t" + std::to_string(fresh++);
      } while (used_symbols.contains(name));
      used_symbols.insert(name);
      e.time = Expr::symbol(name);
    }
    if (ev.cause_line) {
      auto target = event_at_line.find(*ev.cause_line);
      if (target == event_at_line.end())
        parse_fail(e.line, "cause=" + std::to_string(*ev.cause_line) +
                               " does not name an event line");
      e.cause = target->second;
    }
    s.events.push_back(e);
  }

  resolve_initial_values(s, netlist, explicit_init);
  return s;
}

Schedule load_schedule(const std::filesystem::path &path, const Netlist &netlist) {
  return parse_schedule(text::read_file(path), netlist);
}

namespace {

struct GateState {
  InputState inputs;
  bool output = false;
  std::optional<std::size_t> last_output_event;
};

struct StepInfo {
  std::size_t event;
  bool level_before;
  bool level_after;
};

} // namespace

Schedule attribute_causes(Schedule s, const Netlist &netlist,
                          const ScheduleOptions &options) {
  std::vector<GateState> state(netlist.gates.size());
  std::vector<std::vector<StepInfo>> steps(netlist.gates.size());
  for (std::size_t g = 0; g < netlist.gates.size(); ++g) {
    const Gate &gate = netlist.gates[g];
    state[g].inputs = {s.initial_values.at(gate.input_a), s.initial_values.at(gate.input_b)};
    state[g].output = s.initial_values.at(gate.output);
  }

  for (TransitionEvent &e : s.events) {
    if (auto g = netlist.driver_gate(e.signal)) {
      GateState &gs = state[*g];
      bool level = level_after(e.direction);
      const std::vector<StepInfo> &history = steps[*g];

      if (e.cause) {
        if (*e.cause >= e.index)
          throw Error(ErrorKind::CausalityViolation,
                      e.label() + " names a cause that does not precede it", e.signal,
                      e.line);
        auto step = std::find_if(history.begin(), history.end(),
                                 [&](const StepInfo &si) { return si.event == *e.cause; });
        if (step == history.end())
          throw Error(ErrorKind::NoFeasibleCause,
                      e.label() + ": cause " + s.events[*e.cause].label() +
                          " is not an input of gate " + netlist.gates[*g].id,
                      e.signal, e.line);
        if (step->level_after != level) {
          if (!options.allow_nonlogical)
            throw Error(ErrorKind::NoFeasibleCause,
                        e.label() + ": gate " + netlist.gates[*g].id + " does not go " +
                            std::string(to_string(e.direction)) + " after " +
                            s.events[*e.cause].label(),
                        e.signal, e.line);
          e.logical = false;
        }
      } else {
        std::optional<std::size_t> found;
        for (auto it = history.rbegin(); it != history.rend(); ++it) {
          if (gs.last_output_event && it->event < *gs.last_output_event)
            break;
          if (it->level_after == level && it->level_before != level) {
            found = it->event;
            break;
          }
        }
        if (!found && options.allow_nonlogical && !history.empty()) {
          found = history.back().event;
          e.logical = false;
        }
        if (!found)
          throw Error(ErrorKind::NoFeasibleCause,
                      "no earlier input transition of gate " + netlist.gates[*g].id +
                          " explains " + e.label() + " (" +
                          std::string(to_string(e.direction)) + ")",
                      e.signal, e.line);
        e.cause = found;
      }
      gs.output = level;
      gs.last_output_event = e.index;
    }

    for (const FanoutPin &fp : netlist.fanout(e.signal)) {
      GateState &gs = state[fp.gate];
      const Gate &gate = netlist.gates[fp.gate];
      InputState after = gs.inputs.toggled(fp.pin);
      bool before_level = gate_target_level(gate.type, gs.inputs, gs.output);
      bool after_level = gate_target_level(gate.type, after, gs.output);
      steps[fp.gate].push_back({e.index, before_level, after_level});
      gs.inputs = after;
    }
  }
  return s;
}

std::vector<CaseStep> derive_case_sequence(const Schedule &s, const Netlist &netlist,
                                           std::size_t gate, const CaseTable &table) {
  const Gate &g = netlist.gates.at(gate);
  InputState state{s.initial_values.at(g.input_a), s.initial_values.at(g.input_b)};
  std::vector<CaseStep> out;
  for (const TransitionEvent &e : s.events) {
    for (Pin pin : {Pin::A, Pin::B}) {
      if (g.input(pin) != e.signal)
        continue;
      if (state.get(pin) == level_after(e.direction))
        throw Error(ErrorKind::InconsistentInitialState,
                    e.label() + " does not change pin " + (pin == Pin::A ? "A" : "B") +
                        " of gate " + g.id,
                    e.signal, e.line);
      out.push_back({table.classify(state, pin), e.index, pin, state});
      state = state.toggled(pin);
    }
  }
  return out;
}

std::vector<CasePair> case_pairs(const std::vector<CaseStep> &steps) {
  std::vector<CasePair> out;
  for (std::size_t i = 1; i < steps.size(); ++i)
    out.push_back({steps[i - 1].label, steps[i].label});
  return out;
}

} // namespace symta
