#pragma once

#include "symta/expr.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace symta {

enum class GateType : std::uint8_t { NOR2, NAND2, C2 };

std::string_view to_string(GateType type);
std::optional<GateType> parse_gate_type(std::string_view text);

enum class Direction : std::uint8_t { Rising, Falling };

std::string_view to_string(Direction dir);
std::optional<Direction> parse_direction(std::string_view text);
inline Direction direction_to(bool level) {
  return level ? Direction::Rising : Direction::Falling;
}
inline bool level_after(Direction dir) { return dir == Direction::Rising; }

enum class Pin : std::uint8_t { A, B };

struct InputState {
  bool a = false;
  bool b = false;

  bool get(Pin pin) const { return pin == Pin::A ? a : b; }
  InputState toggled(Pin pin) const {
    return pin == Pin::A ? InputState{!a, b} : InputState{a, !b};
  }
  auto operator<=>(const InputState &) const = default;
};

std::string to_string(InputState s);

enum class CaseLabel : std::uint8_t { a, b, c, d, e, f, g, h };

inline constexpr std::array<CaseLabel, 8> kAllCaseLabels = {
    CaseLabel::a, CaseLabel::b, CaseLabel::c, CaseLabel::d,
    CaseLabel::e, CaseLabel::f, CaseLabel::g, CaseLabel::h};

char to_char(CaseLabel label);
std::optional<CaseLabel> parse_case_label(std::string_view text);

struct CaseEdge {
  InputState source;
  Pin toggled = Pin::A;
  InputState target() const { return source.toggled(toggled); }
};

/// Bijection between case labels and the eight single-toggle edges of the
/// 2-input state graph.
class CaseTable {
public:
  /// Fixed anchors a, c, e, g walk (0,0)->(1,0)->(1,1)->(0,1)->(0,0);
  /// b, d, f, h are the reverse-orientation edges.
  static const CaseTable &standard();

  CaseLabel classify(InputState source, Pin toggled) const;
  const CaseEdge &edge(CaseLabel label) const {
    return edges_[static_cast<std::size_t>(label)];
  }
  /// Replaces one label's edge. Call `validate` after a batch of remaps.
  void remap(CaseLabel label, CaseEdge edge);
  /// Throws ValidationError unless every edge is used exactly once.
  void validate() const;

  bool operator==(const CaseTable &) const = default;

private:
  std::array<CaseEdge, 8> edges_{};
};

CaseLabel classify_case(InputState source, Pin toggled,
                        const CaseTable &table = CaseTable::standard());

struct CasePair {
  CaseLabel previous = CaseLabel::a;
  CaseLabel current = CaseLabel::a;
  bool operator==(const CasePair &) const = default;
};

std::string to_string(CasePair pair);
bool chains(CasePair pair, const CaseTable &table = CaseTable::standard());

/// Output level the gate moves towards in input state `s`. The Muller C
/// gate holds `current_output` while its inputs disagree.
bool gate_target_level(GateType type, InputState s, bool current_output);

struct DelayTemplate {
  GateType gate_type = GateType::NOR2;
  CasePair pair;
  Direction direction = Direction::Falling;
  Expr body;
};

struct ColdDelay {
  GateType gate_type = GateType::NOR2;
  CaseLabel case_label = CaseLabel::a;
  Direction direction = Direction::Falling;
  Expr value;
};

struct GateModel {
  GateType type = GateType::NOR2;
  std::vector<std::string> parameters;
  CaseTable cases = CaseTable::standard();
  std::vector<ColdDelay> cold;
  std::vector<DelayTemplate> pairs;

  bool declares(std::string_view parameter) const;
};

/// Outcome of a template lookup. Opaque results carry a placeholder body
/// (`d_<x><y>` or `d_<x>`); callers mint a fresh symbol per use.
struct DelayLookup {
  Expr body;
  bool opaque = false;
  /// An entry exists for the same case(s) with the other direction.
  bool opposite_direction_declared = false;
  std::optional<CasePair> pair;
  std::optional<CaseLabel> cold_case;
  Direction direction = Direction::Falling;
};

inline constexpr std::string_view kTemplateT = "T";
inline constexpr std::string_view kTemplateDelta = "DELTA";

class ModelLibrary {
public:
  ModelLibrary() = default;

  /// Throws ParseError(line) or ValidationError(line).
  static ModelLibrary parse(std::string_view text);
  /// Throws IoError when the file cannot be read.
  static ModelLibrary load_file(const std::filesystem::path &path);
  /// The shipped default library.
  static const ModelLibrary &builtin();
  static std::string_view builtin_text();

  bool empty() const noexcept { return models_.empty(); }
  const GateModel *find(GateType type) const;
  /// Throws UnknownGateType when the type has no section (and the library
  /// is not empty).
  const CaseTable &case_table(GateType type) const;
  std::vector<std::string> parameters(GateType type) const;

  DelayLookup lookup_pair(GateType type, CasePair pair, Direction dir) const;
  DelayLookup lookup_cold(GateType type, CaseLabel label, Direction dir) const;

  const std::vector<GateModel> &models() const noexcept { return models_; }

private:
  std::vector<GateModel> models_;
};

inline ModelLibrary load_model_file(const std::filesystem::path &path) {
  return ModelLibrary::load_file(path);
}

inline DelayLookup lookup_template(const ModelLibrary &lib, GateType type,
                                   CasePair pair, Direction dir) {
  return lib.lookup_pair(type, pair, dir);
}

/// Substitutes T, DELTA and gate parameters into a template body. Every
/// symbol of `body` must be bound (T/DELTA via the optional arguments),
/// otherwise MissingParameter names the first unbound one.
Expr instantiate_delay(const Expr &body, const std::optional<Expr> &t_expr,
                       const std::optional<Expr> &delta_expr,
                       const Bindings &params);

} // namespace symta
