#include "symta/gate_model.hpp"

#include "symta/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace symta {

namespace detail {
extern const std::string_view kBuiltinModelText;
}

std::string_view to_string(GateType type) {
  switch (type) {
  case GateType::NOR2:
    return "NOR2";
  case GateType::NAND2:
    return "NAND2";
  case GateType::C2:
    return "C2";
  }
  return "?";
}

std::optional<GateType> parse_gate_type(std::string_view text) {
  if (text == "NOR2" || text == "NOR")
    return GateType::NOR2;
  if (text == "NAND2" || text == "NAND")
    return GateType::NAND2;
  if (text == "C2" || text == "C")
    return GateType::C2;
  return std::nullopt;
}

std::string_view to_string(Direction dir) {
  return dir == Direction::Rising ? "rising" : "falling";
}

std::optional<Direction> parse_direction(std::string_view text) {
  if (text == "rising" || text == "rise")
    return Direction::Rising;
  if (text == "falling" || text == "fall")
    return Direction::Falling;
  return std::nullopt;
}

std::string to_string(InputState s) {
  return std::string("(") + (s.a ? '1' : '0') + ',' + (s.b ? '1' : '0') + ')';
}

char to_char(CaseLabel label) {
  return static_cast<char>('a' + static_cast<int>(label));
}

std::optional<CaseLabel> parse_case_label(std::string_view text) {
  if (text.size() != 1 || text[0] < 'a' || text[0] > 'h')
    return std::nullopt;
  return static_cast<CaseLabel>(text[0] - 'a');
}

const CaseTable &CaseTable::standard() {
  static const CaseTable table = [] {
    CaseTable t;
    t.remap(CaseLabel::a, {{false, false}, Pin::A});
    t.remap(CaseLabel::b, {{false, false}, Pin::B});
    t.remap(CaseLabel::c, {{true, false}, Pin::B});
    t.remap(CaseLabel::d, {{false, true}, Pin::A});
    t.remap(CaseLabel::e, {{true, true}, Pin::A});
    t.remap(CaseLabel::f, {{true, true}, Pin::B});
    t.remap(CaseLabel::g, {{false, true}, Pin::B});
    t.remap(CaseLabel::h, {{true, false}, Pin::A});
    return t;
  }();
  return table;
}

CaseLabel CaseTable::classify(InputState source, Pin toggled) const {
  for (CaseLabel label : kAllCaseLabels) {
    const CaseEdge &e = edge(label);
    if (e.source == source && e.toggled == toggled)
      return label;
  }
  // Unreachable for a validated table.
  throw Error(ErrorKind::ValidationError,
              "case table has no edge leaving " + to_string(source));
}

void CaseTable::remap(CaseLabel label, CaseEdge edge) {
  edges_[static_cast<std::size_t>(label)] = edge;
}

void CaseTable::validate() const {
  for (std::size_t i = 0; i < edges_.size(); ++i)
    for (std::size_t j = i + 1; j < edges_.size(); ++j)
      if (edges_[i].source == edges_[j].source &&
          edges_[i].toggled == edges_[j].toggled)
        throw Error(ErrorKind::ValidationError,
                    std::string("case labels ") + to_char(kAllCaseLabels[i]) +
                        " and " + to_char(kAllCaseLabels[j]) +
                        " name the same edge");
}

CaseLabel classify_case(InputState source, Pin toggled, const CaseTable &table) {
  return table.classify(source, toggled);
}

std::string to_string(CasePair pair) {
  return std::string("(") + to_char(pair.previous) + ',' +
         to_char(pair.current) + ')';
}

bool chains(CasePair pair, const CaseTable &table) {
  return table.edge(pair.previous).target() == table.edge(pair.current).source;
}

bool gate_target_level(GateType type, InputState s, bool current_output) {
  switch (type) {
  case GateType::NOR2:
    return !(s.a || s.b);
  case GateType::NAND2:
    return !(s.a && s.b);
  case GateType::C2:
    return s.a == s.b ? s.a : current_output;
  }
  return current_output;
}

bool GateModel::declares(std::string_view parameter) const {
  return std::find(parameters.begin(), parameters.end(), parameter) !=
         parameters.end();
}

namespace {

struct PendingEntry {
  int line = 0;
  bool cold = false;
  CaseLabel label = CaseLabel::a;
  CasePair pair;
  Direction direction = Direction::Falling;
  Expr body;
};

struct PendingSection {
  GateModel model;
  std::vector<PendingEntry> entries;
  bool remapped = false;
  int line = 0;
};

[[noreturn]] void parse_fail(int line, const std::string &what) {
  throw Error(ErrorKind::ParseError, what, {}, line);
}

[[noreturn]] void invalid(int line, const std::string &what) {
  throw Error(ErrorKind::ValidationError, what, {}, line);
}

InputState parse_state(std::string_view text, int line) {
  if (text.size() != 5 || text[0] != '(' || text[2] != ',' || text[4] != ')' ||
      (text[1] != '0' && text[1] != '1') || (text[3] != '0' && text[3] != '1'))
    parse_fail(line, "malformed input state '" + std::string(text) + "'");
  return {text[1] == '1', text[3] == '1'};
}

/// Parses "(x,y)" into a case pair.
CasePair parse_pair(std::string_view text, int line) {
  if (text.size() != 5 || text[0] != '(' || text[2] != ',' || text[4] != ')')
    parse_fail(line, "malformed case pair '" + std::string(text) + "'");
  auto prev = parse_case_label(text.substr(1, 1));
  auto cur = parse_case_label(text.substr(3, 1));
  if (!prev || !cur)
    parse_fail(line, "unknown case label in '" + std::string(text) + "'");
  return {*prev, *cur};
}

Expr parse_body(std::string_view text, int line) {
  try {
    return parse_expr(text);
  } catch (const Error &e) {
    throw Error(e.kind(), e.what(), e.subject(), line);
  }
}

void check_direction(GateType type, InputState target, Direction dir, int line,
                     const std::string &what) {
  bool level = level_after(dir);
  bool ok = true;
  if (type == GateType::C2) {
    if (target.a == target.b)
      ok = target.a == level;
  } else {
    ok = gate_target_level(type, target, false) == level;
  }
  if (!ok)
    invalid(line, what + ": " + std::string(to_string(type)) + " cannot go " +
                      std::string(to_string(dir)) + " in input state " +
                      to_string(target));
}

void finish_section(PendingSection &section, std::vector<GateModel> &out) {
  GateModel &model = section.model;
  if (section.remapped) {
    try {
      model.cases.validate();
    } catch (const Error &e) {
      throw Error(ErrorKind::ValidationError, e.what(), {}, section.line);
    }
  }

  for (const PendingEntry &entry : section.entries) {
    std::string what = entry.cold ? std::string("cold ") + to_char(entry.label)
                                  : "pair " + to_string(entry.pair);
    for (const std::string &sym : free_symbols(entry.body)) {
      bool reserved = sym == kTemplateT || sym == kTemplateDelta;
      if (reserved && entry.cold)
        invalid(entry.line, what + ": cold delays cannot use " + sym);
      if (!reserved && !model.declares(sym))
        invalid(entry.line, what + ": unknown symbol " + sym);
    }
    if (entry.cold) {
      InputState target = model.cases.edge(entry.label).target();
      check_direction(model.type, target, entry.direction, entry.line, what);
      bool dup = std::any_of(model.cold.begin(), model.cold.end(), [&](const ColdDelay &c) {
        return c.case_label == entry.label && c.direction == entry.direction;
      });
      if (dup)
        invalid(entry.line, what + ": duplicate entry");
      model.cold.push_back({model.type, entry.label, entry.direction, entry.body});
    } else {
      if (!chains(entry.pair, model.cases))
        invalid(entry.line, what + ": target state of " + to_char(entry.pair.previous) +
                                " is not the source state of " + to_char(entry.pair.current));
      InputState target = model.cases.edge(entry.pair.current).target();
      check_direction(model.type, target, entry.direction, entry.line, what);
      bool dup = std::any_of(model.pairs.begin(), model.pairs.end(), [&](const DelayTemplate &t) {
        return t.pair == entry.pair && t.direction == entry.direction;
      });
      if (dup)
        invalid(entry.line, what + ": duplicate entry");
      model.pairs.push_back({model.type, entry.pair, entry.direction, entry.body});
    }
  }
  out.push_back(std::move(model));
}

/// Splits "<lhs> = <expr>" and returns the two halves trimmed.
std::pair<std::string_view, std::string_view> split_assignment(std::string_view line_text,
                                                               int line) {
  auto eq = line_text.find('=');
  if (eq == std::string_view::npos)
    parse_fail(line, "expected '= <expression>'");
  std::string_view rhs = text::trim(line_text.substr(eq + 1));
  if (rhs.empty())
    parse_fail(line, "empty expression");
  return {text::trim(line_text.substr(0, eq)), rhs};
}

} // namespace

ModelLibrary ModelLibrary::parse(std::string_view source) {
  ModelLibrary lib;
  std::optional<PendingSection> section;
  int line_no = 0;

  for (std::string_view raw : text::lines(source)) {
    ++line_no;
    std::string_view line = text::trim(text::strip_comment(raw));
    if (line.empty())
      continue;
    std::vector<std::string_view> words = text::split_ws(line);
    std::string_view keyword = words.front();

    if (keyword == "gate") {
      if (words.size() != 2)
        parse_fail(line_no, "expected 'gate <NOR2|NAND2|C2>'");
      auto type = parse_gate_type(words[1]);
      if (!type)
        parse_fail(line_no, "unknown gate type '" + std::string(words[1]) + "'");
      if (section)
        finish_section(*section, lib.models_);
      if (lib.find(*type))
        invalid(line_no, "duplicate section for " + std::string(to_string(*type)));
      section.emplace();
      section->model.type = *type;
      section->line = line_no;
      continue;
    }

    if (!section)
      parse_fail(line_no, "'" + std::string(keyword) + "' outside a gate section");

    if (keyword == "params") {
      for (std::size_t i = 1; i < words.size(); ++i) {
        std::string name(words[i]);
        if (!is_valid_identifier(name))
          parse_fail(line_no, "invalid parameter name '" + name + "'");
        if (name == kTemplateT || name == kTemplateDelta)
          invalid(line_no, "parameter name " + name + " is reserved");
        if (!section->model.declares(name))
          section->model.parameters.push_back(name);
      }
    } else if (keyword == "edge") {
      // edge <label> (x,y) -> (x,y)
      if (words.size() != 5 || words[3] != "->")
        parse_fail(line_no, "expected 'edge <label> (x,y) -> (x,y)'");
      auto label = parse_case_label(words[1]);
      if (!label)
        parse_fail(line_no, "unknown case label '" + std::string(words[1]) + "'");
      InputState from = parse_state(words[2], line_no);
      InputState to = parse_state(words[4], line_no);
      bool a_toggles = from.a != to.a;
      bool b_toggles = from.b != to.b;
      if (a_toggles == b_toggles)
        invalid(line_no, "edge must toggle exactly one input");
      section->model.cases.remap(*label, {from, a_toggles ? Pin::A : Pin::B});
      section->remapped = true;
    } else if (keyword == "cold" || keyword == "pair") {
      auto [lhs, rhs] = split_assignment(line, line_no);
      std::vector<std::string_view> head = text::split_ws(lhs);
      if (head.size() != 3)
        parse_fail(line_no, "expected '" + std::string(keyword) +
                                " <case> <rising|falling> = <expression>'");
      PendingEntry entry;
      entry.line = line_no;
      entry.cold = keyword == "cold";
      if (entry.cold) {
        auto label = parse_case_label(head[1]);
        if (!label)
          parse_fail(line_no, "unknown case label '" + std::string(head[1]) + "'");
        entry.label = *label;
      } else {
        entry.pair = parse_pair(head[1], line_no);
      }
      auto dir = parse_direction(head[2]);
      if (!dir)
        parse_fail(line_no, "expected rising or falling, got '" + std::string(head[2]) + "'");
      entry.direction = *dir;
      entry.body = parse_body(rhs, line_no);
      section->entries.push_back(std::move(entry));
    } else {
      parse_fail(line_no, "unknown directive '" + std::string(keyword) + "'");
    }
  }
  if (section)
    finish_section(*section, lib.models_);
  return lib;
}

ModelLibrary ModelLibrary::load_file(const std::filesystem::path &path) {
  return parse(text::read_file(path));
}

std::string_view ModelLibrary::builtin_text() { return detail::kBuiltinModelText; }

const ModelLibrary &ModelLibrary::builtin() {
  static const ModelLibrary lib = parse(builtin_text());
  return lib;
}

const GateModel *ModelLibrary::find(GateType type) const {
  for (const GateModel &m : models_)
    if (m.type == type)
      return &m;
  return nullptr;
}

namespace {

const GateModel *require(const ModelLibrary &lib, GateType type) {
  if (lib.empty())
    return nullptr;
  if (const GateModel *m = lib.find(type))
    return m;
  throw Error(ErrorKind::UnknownGateType,
              "model library has no section for " + std::string(to_string(type)),
              std::string(to_string(type)));
}

} // namespace

const CaseTable &ModelLibrary::case_table(GateType type) const {
  const GateModel *m = require(*this, type);
  return m ? m->cases : CaseTable::standard();
}

std::vector<std::string> ModelLibrary::parameters(GateType type) const {
  const GateModel *m = require(*this, type);
  return m ? m->parameters : std::vector<std::string>{};
}

DelayLookup ModelLibrary::lookup_pair(GateType type, CasePair pair,
                                      Direction dir) const {
  DelayLookup out;
  out.pair = pair;
  out.direction = dir;
  if (const GateModel *m = require(*this, type)) {
    for (const DelayTemplate &t : m->pairs) {
      if (!(t.pair == pair))
        continue;
      if (t.direction == dir) {
        out.body = t.body;
        return out;
      }
      out.opposite_direction_declared = true;
    }
  }
  out.opaque = true;
  out.body = Expr::symbol(std::string("d_") + to_char(pair.previous) + to_char(pair.current));
  return out;
}

DelayLookup ModelLibrary::lookup_cold(GateType type, CaseLabel label,
                                      Direction dir) const {
  DelayLookup out;
  out.cold_case = label;
  out.direction = dir;
  if (const GateModel *m = require(*this, type)) {
    for (const ColdDelay &c : m->cold) {
      if (c.case_label != label)
        continue;
      if (c.direction == dir) {
        out.body = c.value;
        return out;
      }
      out.opposite_direction_declared = true;
    }
  }
  out.opaque = true;
  out.body = Expr::symbol(std::string("d_") + to_char(label) + "_cold");
  return out;
}

Expr instantiate_delay(const Expr &body, const std::optional<Expr> &t_expr,
                       const std::optional<Expr> &delta_expr,
                       const Bindings &params) {
  Bindings all = params;
  for (const std::string &sym : free_symbols(body)) {
    if (sym == kTemplateT) {
      if (!t_expr)
        throw Error(ErrorKind::MissingParameter,
                    "template uses T but there is no previous output transition", sym);
      all.insert_or_assign(sym, *t_expr);
    } else if (sym == kTemplateDelta) {
      if (!delta_expr)
        throw Error(ErrorKind::MissingParameter,
                    "template uses DELTA but there is no previous input transition", sym);
      all.insert_or_assign(sym, *delta_expr);
    } else if (!params.contains(sym)) {
      throw Error(ErrorKind::MissingParameter, "parameter " + sym + " is not bound", sym);
    }
  }
  return substitute(body, all);
}

} // namespace symta
