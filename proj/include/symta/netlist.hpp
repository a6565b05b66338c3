#pragma once

#include "symta/expr.hpp"
#include "symta/gate_model.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace symta {

/// How gate parameters without an explicit `param` binding are named.
enum class ParamNaming : std::uint8_t {
  Shared,  ///< the bare model symbol, e.g. C1
  PerGate, ///< suffixed with the gate id, e.g. C1_g3
};

struct Gate {
  std::string id;
  GateType type = GateType::NOR2;
  std::string input_a;
  std::string input_b;
  std::string output;
  /// Explicit parameter bindings from the netlist file.
  Bindings params;

  const std::string &input(Pin pin) const {
    return pin == Pin::A ? input_a : input_b;
  }
  bool operator==(const Gate &) const = default;
};

struct FanoutPin {
  std::size_t gate = 0;
  Pin pin = Pin::A;
};

class Netlist {
public:
  std::vector<std::string> primary_inputs;
  std::vector<std::string> primary_outputs;
  std::vector<Gate> gates;
  ParamNaming param_naming = ParamNaming::Shared;

  bool operator==(const Netlist &) const = default;

  bool is_primary_input(std::string_view signal) const;
  std::optional<std::size_t> driver_gate(std::string_view signal) const;
  std::optional<std::size_t> find_gate(std::string_view id) const;
  bool has_signal(std::string_view signal) const;
  /// Primary inputs followed by gate outputs, in declaration order.
  std::vector<std::string> signals() const;
  std::vector<FanoutPin> fanout(std::string_view signal) const;

  /// Parameter bindings for one gate: explicit `param` values, the rest of
  /// `declared` named according to `param_naming`.
  Bindings resolve_parameters(const Gate &gate,
                              const std::vector<std::string> &declared) const;
};

/// Throws MultipleDrivers, UndeclaredSignal or ValidationError.
void validate(const Netlist &netlist);

/// Native text format:
///   input <name>
///   output <name>
///   params shared|per-gate
///   gate <id> <NOR2|NAND2|C2> A=<sig> B=<sig> Y=<sig> [param <name>=<expr>]...
/// Throws ParseError(line) plus the `validate` errors.
Netlist parse_netlist(std::string_view text);
Netlist load_netlist(const std::filesystem::path &path);

/// ISCAS .bench import (2-input NAND/NOR only); parameters are per-gate
/// fresh symbols and gate ids are the output signal names.
Netlist parse_bench(std::string_view text);

/// Inverse of `parse_netlist`.
std::string print_netlist(const Netlist &netlist);

struct Topology {
  /// Per gate: indices of the gates driving its inputs (sorted, unique).
  std::vector<std::vector<std::size_t>> drivers;
  /// Per gate: indices of the gates it drives (sorted, unique).
  std::vector<std::vector<std::size_t>> fanout;
  /// Strongly connected components, each sorted, in order of first gate.
  std::vector<std::vector<std::size_t>> components;
  /// Components that form a feedback loop (size > 1 or a self loop).
  std::vector<std::vector<std::size_t>> cycles;
  /// Longest gate-to-gate dependency chain in edges; empty when cyclic.
  std::optional<std::size_t> depth;

  bool acyclic() const { return cycles.empty(); }
};

Topology topology(const Netlist &netlist);

} // namespace symta
