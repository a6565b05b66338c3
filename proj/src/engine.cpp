#include "symta/engine.hpp"

#include "symta/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <sstream>

namespace symta {

const Expr &TimingSolution::time(std::size_t event) const {
  if (event >= times.size())
    throw Error(ErrorKind::UnknownEvent, "no event #" + std::to_string(event),
                "#" + std::to_string(event));
  return times[event];
}

const GateStep *TimingSolution::cause_step(std::size_t event) const {
  if (event >= outputs.size() || !outputs[event])
    return nullptr;
  return &steps[outputs[event]->step];
}

std::set<std::string> TimingSolution::free_symbols() const {
  std::set<std::string> out;
  for (const Expr &t : times)
    out.merge(symta::free_symbols(t));
  for (const GateStep &s : steps)
    if (s.delay)
      out.merge(symta::free_symbols(*s.delay));
  return out;
}

namespace {

struct GateRun {
  InputState inputs;
  bool output = false;
  std::optional<std::size_t> last_output;
  std::optional<std::size_t> last_step;
  Bindings params;
  std::vector<std::size_t> steps;
};

class Propagator {
public:
  Propagator(const Netlist &netlist, const Schedule &schedule, const ModelLibrary &library)
      : netlist_(netlist), library_(library) {
    sol_.schedule = schedule;
    sol_.times.resize(schedule.events.size(), Expr::integer(0));
    sol_.outputs.resize(schedule.events.size());
    gates_.resize(netlist.gates.size());
    for (std::size_t g = 0; g < netlist.gates.size(); ++g) {
      const Gate &gate = netlist.gates[g];
      sol_.gate_ids.push_back(gate.id);
      GateRun &run = gates_[g];
      run.inputs = {schedule.initial_values.at(gate.input_a),
                    schedule.initial_values.at(gate.input_b)};
      run.output = schedule.initial_values.at(gate.output);
      run.params = netlist.resolve_parameters(gate, library.parameters(gate.type));
      for (const auto &[name, value] : run.params)
        sol_.parameter_symbols.merge(symta::free_symbols(value));
    }
    used_ = sol_.parameter_symbols;
    for (const TransitionEvent &e : schedule.events)
      if (e.time)
        used_.merge(symta::free_symbols(*e.time));
  }

  TimingSolution run() {
    for (const TransitionEvent &e : sol_.schedule.events) {
      if (auto g = netlist_.driver_gate(e.signal))
        output_event(e, *g);
      else
        sol_.times[e.index] = canonicalize(*e.time);
      for (const FanoutPin &fp : netlist_.fanout(e.signal))
        input_step(e, fp);
    }
    return std::move(sol_);
  }

private:
  std::string mint(const std::string &base) {
    std::string name = base;
    for (int k = 2; used_.contains(name); ++k)
      name = base + "_" + std::to_string(k);
    used_.insert(name);
    sol_.opaque_symbols.insert(name);
    return name;
  }

  void output_event(const TransitionEvent &e, std::size_t g) {
    const Gate &gate = netlist_.gates[g];
    if (!e.cause)
      throw Error(ErrorKind::NoFeasibleCause,
                  e.label() + " has no cause; run cause attribution first", e.signal, e.line);
    std::size_t c = *e.cause;
    if (c >= e.index)
      throw Error(ErrorKind::CausalityViolation,
                  e.label() + " refers to the later event " +
                      sol_.schedule.events.at(c).label(),
                  e.signal, e.line);
    GateRun &run = gates_[g];
    auto it = std::find_if(run.steps.begin(), run.steps.end(),
                           [&](std::size_t s) { return sol_.steps[s].event == c; });
    if (it == run.steps.end())
      throw Error(ErrorKind::NoFeasibleCause,
                  sol_.schedule.events[c].label() + " is not an input of gate " + gate.id,
                  e.signal, e.line);
    GateStep &step = sol_.steps[*it];
    const DelayLookup &lk = lookups_[*it];

    OutputTiming out;
    out.gate = g;
    out.cause = c;
    out.step = *it;
    out.logical = e.logical;
    if (!e.logical) {
      std::string base =
          step.pair ? std::string("d_") + to_char(step.pair->previous) + to_char(step.pair->current)
                    : "d_nl";
      out.delay = Expr::symbol(mint(base));
      out.opaque = true;
      sol_.diagnostics.push_back(e.label() + " is a non-logical transition; opaque delay " +
                                 to_string(out.delay));
    } else {
      if (step.target != e.direction)
        throw Error(ErrorKind::DirectionMismatch,
                    e.label() + " is " + std::string(to_string(e.direction)) + " but gate " +
                        gate.id + " moves " + std::string(to_string(step.target)),
                    e.signal, e.line);
      if (step.opaque) {
        if (lk.opposite_direction_declared)
          throw Error(ErrorKind::DirectionMismatch,
                      "the " + std::string(to_string(gate.type)) + " model declares " +
                          (step.pair ? "pair " + to_string(*step.pair)
                                     : std::string("cold case ") + to_char(step.label)) +
                          " only for the other direction than " + e.label(),
                      e.signal, e.line);
        step.delay = Expr::symbol(mint(to_string(lk.body)));
        sol_.diagnostics.push_back(e.label() + ": no template in the model; opaque symbol " +
                                   to_string(*step.delay));
      }
      out.delay = *step.delay;
      out.opaque = step.opaque;
    }
    step.output_event = e.index;
    sol_.times[e.index] = canonicalize(sol_.times[c] + out.delay);
    sol_.outputs[e.index] = std::move(out);
    run.output = level_after(e.direction);
    run.last_output = e.index;
  }

  void input_step(const TransitionEvent &e, const FanoutPin &fp) {
    const Gate &gate = netlist_.gates[fp.gate];
    GateRun &run = gates_[fp.gate];
    const CaseTable &table =
        library_.empty() ? CaseTable::standard() : library_.case_table(gate.type);

    if (run.inputs.get(fp.pin) == level_after(e.direction))
      throw Error(ErrorKind::InconsistentInitialState,
                  e.label() + " does not change pin " + (fp.pin == Pin::A ? "A" : "B") +
                      " of gate " + gate.id,
                  e.signal, e.line);

    GateStep step;
    step.gate = fp.gate;
    step.event = e.index;
    step.pin = fp.pin;
    step.before = run.inputs;
    step.after = run.inputs.toggled(fp.pin);
    step.label = table.classify(step.before, fp.pin);
    step.target = direction_to(gate_target_level(gate.type, step.after, run.output));
    const Expr &now = sol_.times[e.index];
    if (run.last_step) {
      const GateStep &prev = sol_.steps[*run.last_step];
      step.pair = CasePair{prev.label, step.label};
      step.delta_expr = canonicalize(now - sol_.times[prev.event]);
    }
    if (run.last_output)
      step.t_expr = canonicalize(now - sol_.times[*run.last_output]);

    DelayLookup lk;
    if (!run.last_output) {
      step.cold = true;
      lk = library_.lookup_cold(gate.type, step.label, step.target);
    } else {
      lk = library_.lookup_pair(gate.type, *step.pair, step.target);
    }
    step.opaque = lk.opaque;
    if (!lk.opaque) {
      step.delay = canonicalize(instantiate_delay(lk.body, step.t_expr, step.delta_expr,
                                                  run.params));
      step.formula = canonicalize(instantiate_delay(
          lk.body, Expr::symbol(std::string(kTemplateT)),
          Expr::symbol(std::string(kTemplateDelta)), run.params));
    }

    run.last_step = sol_.steps.size();
    run.steps.push_back(sol_.steps.size());
    run.inputs = step.after;
    sol_.steps.push_back(std::move(step));
    lookups_.push_back(std::move(lk));
  }

  const Netlist &netlist_;
  const ModelLibrary &library_;
  TimingSolution sol_;
  std::vector<GateRun> gates_;
  std::vector<DelayLookup> lookups_;
  std::set<std::string> used_;
};

std::string describe(const TransitionEvent &e) {
  return e.label() + " (" + e.signal + " " + std::string(to_string(e.direction)) + ")";
}

std::string case_text(const GateStep &s) {
  return s.pair ? "pair " + to_string(*s.pair) : std::string("cold case ") + to_char(s.label);
}

} // namespace

TimingSolution propagate(const Netlist &netlist, const Schedule &schedule,
                         const ModelLibrary &library) {
  return Propagator(netlist, schedule, library).run();
}

std::string explain(const TimingSolution &sol, const Netlist &netlist, std::size_t event) {
  if (event >= sol.schedule.events.size())
    throw Error(ErrorKind::UnknownEvent, "no event #" + std::to_string(event),
                "#" + std::to_string(event));
  const TransitionEvent &e = sol.schedule.events[event];
  std::ostringstream os;
  if (!sol.outputs[event]) {
    os << describe(e) << "\n";
    os << "given: " << sol.times[event] << "\n";
  } else {
    const OutputTiming &out = *sol.outputs[event];
    const GateStep &step = sol.steps[out.step];
    const Gate &gate = netlist.gates[out.gate];
    os << describe(e) << " at gate " << gate.id << " (" << to_string(gate.type) << ")\n";
    os << "cause: " << describe(sol.schedule.events[out.cause]) << " at "
       << sol.times[out.cause] << "\n";
    os << "case " << to_char(step.label) << " on pin " << (step.pin == Pin::A ? "A" : "B")
       << ": " << to_string(step.before) << " -> " << to_string(step.after) << "\n";
    if (step.t_expr)
      os << "T = " << *step.t_expr << "\n";
    if (step.delta_expr)
      os << "DELTA = " << *step.delta_expr << "\n";
    std::string t_name = "t_" + e.signal;
    if (!out.logical) {
      os << "non-logical transition; opaque symbol " << out.delay << "\n";
      os << t_name << " = " << sol.times[event] << "\n";
    } else if (out.opaque) {
      os << case_text(step) << ": no template in the model; opaque symbol " << out.delay << "\n";
      os << t_name << " = " << sol.times[event] << "\n";
    } else {
      if (!step.cold)
        os << case_text(step) << " " << to_string(step.target) << ": delay = " << out.delay
           << "\n";
      os << case_text(step) << ": " << t_name << " = " << sol.times[event] << "\n";
    }
  }
  for (const GateStep &s : sol.steps) {
    if (s.event != event)
      continue;
    os << "drives gate " << netlist.gates[s.gate].id << " pin "
       << (s.pin == Pin::A ? "A" : "B") << ": case " << to_char(s.label);
    if (s.pair)
      os << ", pair " << to_string(*s.pair);
    os << ", towards " << to_string(s.target);
    if (s.delay)
      os << ", delay " << *s.delay;
    else
      os << ", opaque";
    os << "\n";
  }
  return os.str();
}

std::string format_report(const TimingSolution &sol, const Netlist &) {
  std::ostringstream os;
  for (const TransitionEvent &e : sol.schedule.events)
    os << e.label() << " " << to_string(e.direction) << " -> " << sol.times[e.index] << "\n";
  for (const std::string &d : sol.diagnostics)
    os << "note: " << d << "\n";
  return os.str();
}

std::string format_json(const TimingSolution &sol, const Netlist &netlist) {
  using nlohmann::json;
  json events = json::array();
  for (const TransitionEvent &e : sol.schedule.events) {
    json j;
    j["index"] = e.index;
    j["event"] = e.label();
    j["signal"] = e.signal;
    j["direction"] = to_string(e.direction);
    j["expr"] = to_string(sol.times[e.index]);
    if (const auto &out = sol.outputs[e.index]) {
      const GateStep &step = sol.steps[out->step];
      j["kind"] = "output";
      j["gate"] = netlist.gates[out->gate].id;
      j["cause"] = sol.schedule.events[out->cause].label();
      j["case"] = std::string(1, to_char(step.label));
      j["pair"] = step.pair ? json(to_string(*step.pair)) : json(nullptr);
      j["cold"] = step.cold;
      j["opaque"] = out->opaque;
      j["logical"] = out->logical;
      j["delay"] = to_string(out->delay);
      j["T"] = step.t_expr ? json(to_string(*step.t_expr)) : json(nullptr);
      j["DELTA"] = step.delta_expr ? json(to_string(*step.delta_expr)) : json(nullptr);
    } else {
      j["kind"] = "input";
    }
    events.push_back(std::move(j));
  }
  json doc;
  doc["events"] = std::move(events);
  doc["diagnostics"] = sol.diagnostics;
  return doc.dump(2) + "\n";
}

std::string format_waveform(const TimingSolution &sol, const Netlist &netlist) {
  constexpr std::size_t kCol = 4;
  std::vector<std::string> signals = netlist.signals();
  std::size_t name_width = 6;
  for (const std::string &s : signals)
    name_width = std::max(name_width, s.size() + 2);

  std::ostringstream os;
  os << std::string(name_width + 2, ' ');
  for (std::size_t i = 0; i < sol.schedule.events.size(); ++i) {
    std::string idx = std::to_string(i);
    os << idx << std::string(kCol > idx.size() ? kCol - idx.size() : 1, ' ');
  }
  os << "\n";
  for (const std::string &signal : signals) {
    bool level = sol.schedule.initial_values.at(signal);
    std::string row = level ? "--" : "__";
    for (const TransitionEvent &e : sol.schedule.events) {
      if (e.signal != signal) {
        row += std::string(kCol, level ? '-' : '_');
        continue;
      }
      level = level_after(e.direction);
      row += level ? "/---" : "\\___";
    }
    os << signal << std::string(name_width - signal.size(), ' ') << row << "\n";
  }
  os << "\n";
  for (const TransitionEvent &e : sol.schedule.events)
    os << "#" << e.index << " " << e.label() << " " << to_string(e.direction) << " @ "
       << sol.times[e.index] << "\n";
  return os.str();
}

} // namespace symta
