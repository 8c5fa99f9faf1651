#include "physq/program.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace physq {

std::string to_string(ValType t) {
  switch (t) {
    case ValType::objects: return "objects";
    case ValType::events: return "events";
    case ValType::event: return "event";
    case ValType::object: return "object";
    case ValType::integer: return "integer";
    case ValType::boolean: return "boolean";
    case ValType::string: return "string";
    case ValType::frame: return "frame";
    case ValType::attribute: return "attribute";
  }
  return "?";
}

ValType type_of(const Value& v) {
  return static_cast<ValType>(v.index());
}

std::string value_to_answer(const Value& v) {
  switch (type_of(v)) {
    case ValType::boolean:
      return std::get<BoolVal>(v).value ? "yes" : "no";
    case ValType::integer:
      return std::to_string(std::get<IntVal>(v).value);
    case ValType::attribute:
      return std::get<AttrVal>(v).value;
    case ValType::string:
      return std::get<StringVal>(v).value;
    case ValType::frame:
      return std::to_string(std::get<FrameVal>(v).frame);
    default:
      throw std::invalid_argument("value of type " + to_string(type_of(v)) +
                                  " is not an answer");
  }
}

bool Program::operator==(const Program& o) const {
  if (nodes.size() != o.nodes.size()) return false;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].op != o.nodes[i].op || nodes[i].inputs != o.nodes[i].inputs ||
        nodes[i].literals != o.nodes[i].literals) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Operation table
// ---------------------------------------------------------------------------

namespace {

ArgSig val(ValType t) {
  ArgSig a;
  a.types = {t};
  return a;
}

ArgSig val2(ValType t1, ValType t2) {
  ArgSig a;
  a.types = {t1, t2};
  return a;
}

ArgSig lit(LitClass c, bool optional = false) {
  ArgSig a;
  a.is_literal = true;
  a.lit = c;
  a.optional = optional;
  return a;
}

std::vector<OpSig> build_table() {
  using VT = ValType;
  std::vector<OpSig> t;
  // inputs
  t.push_back({"objects", {}, VT::objects});
  t.push_back({"events", {}, VT::events});
  t.push_back({"unseen_events", {}, VT::events});
  t.push_back({"start", {}, VT::event});
  t.push_back({"end", {}, VT::event});
  // physical property filters
  t.push_back({"filter_heavy", {val(VT::objects)}, VT::objects});
  t.push_back({"filter_light", {val(VT::objects)}, VT::objects});
  t.push_back({"filter_charged", {val(VT::objects)}, VT::objects});
  t.push_back({"filter_uncharged", {val(VT::objects)}, VT::objects});
  // appearance filters
  t.push_back({"filter_static_attr",
               {val(VT::objects), lit(LitClass::static_attr)},
               VT::objects});
  t.push_back({"filter_dynamic_attr",
               {val(VT::objects), lit(LitClass::dynamic_attr), val(VT::frame)},
               VT::objects});
  // event operations
  t.push_back({"filter_event",
               {val(VT::events), val(VT::objects),
                lit(LitClass::event_kind, /*optional=*/true)},
               VT::events});
  t.push_back({"get_col_partner",
               {val(VT::event), val(VT::object)},
               VT::object});
  t.push_back({"filter_before", {val(VT::events), val(VT::event)}, VT::events});
  t.push_back({"filter_after", {val(VT::events), val(VT::event)}, VT::events});
  t.push_back({"filter_order",
               {val(VT::events), lit(LitClass::order)},
               VT::event});
  t.push_back({"get_frame", {val(VT::event)}, VT::frame});
  // others
  {
    OpSig unique{"unique", {val2(VT::objects, VT::events)}, VT::object};
    unique.polymorphic = true;
    t.push_back(unique);
  }
  // counterfactual
  t.push_back({"counterfactual_mass_heavy", {val(VT::object)}, VT::events});
  t.push_back({"counterfactual_mass_light", {val(VT::object)}, VT::events});
  t.push_back({"counterfactual_uncharged", {val(VT::object)}, VT::events});
  t.push_back(
      {"counterfactual_opposite_charged", {val(VT::object)}, VT::events});
  // outputs
  t.push_back({"query_attribute",
               {val(VT::object), lit(LitClass::head_attr)},
               VT::attribute});
  t.push_back({"query_both_attribute",
               {val(VT::objects), lit(LitClass::head_attr)},
               VT::string});
  t.push_back({"query_direction",
               {val(VT::object), val(VT::frame)},
               VT::attribute});
  t.push_back({"is_heavier", {val(VT::object), val(VT::object)}, VT::boolean});
  t.push_back({"is_lighter", {val(VT::object), val(VT::object)}, VT::boolean});
  t.push_back(
      {"is_same_charged", {val(VT::object), val(VT::object)}, VT::boolean});
  t.push_back(
      {"is_opposite_charged", {val(VT::object), val(VT::object)}, VT::boolean});
  {
    OpSig count{"count", {val2(VT::objects, VT::events)}, VT::integer};
    t.push_back(count);
  }
  {
    OpSig exist{"exist", {val2(VT::objects, VT::events)}, VT::boolean};
    t.push_back(exist);
  }
  t.push_back({"belong_to", {val(VT::event), val(VT::events)}, VT::boolean});
  t.push_back({"negate", {val(VT::boolean)}, VT::boolean});
  return t;
}

const std::set<std::string>& literal_vocab(LitClass c) {
  static const std::set<std::string> statics = {
      "gray", "red",  "blue",   "green",    "brown", "cyan",
      "purple", "yellow", "cube", "sphere", "cylinder", "metal", "rubber"};
  static const std::set<std::string> dynamics = {"moving", "stationary"};
  static const std::set<std::string> orders = {"first", "second", "last"};
  static const std::set<std::string> kinds = {"in", "out", "collision",
                                              "attraction", "repulsion"};
  static const std::set<std::string> heads = {"color", "shape", "material"};
  switch (c) {
    case LitClass::static_attr: return statics;
    case LitClass::dynamic_attr: return dynamics;
    case LitClass::order: return orders;
    case LitClass::event_kind: return kinds;
    case LitClass::head_attr: return heads;
  }
  return statics;
}

}  // namespace

const std::vector<OpSig>& op_table() {
  static const std::vector<OpSig> table = build_table();
  return table;
}

const OpSig* find_op(const std::string& name) {
  for (const auto& sig : op_table()) {
    if (sig.name == name) return &sig;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

struct Token {
  enum class Kind { lparen, rparen, atom, eof } kind;
  std::string text;
  int line;
  int col;
};

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++col;
      ++i;
      continue;
    }
    if (c == '(') {
      out.push_back({Token::Kind::lparen, "(", line, col});
      ++col;
      ++i;
      continue;
    }
    if (c == ')') {
      out.push_back({Token::Kind::rparen, ")", line, col});
      ++col;
      ++i;
      continue;
    }
    const int start_col = col;
    std::string atom;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) &&
           text[i] != '(' && text[i] != ')') {
      atom.push_back(text[i]);
      ++i;
      ++col;
    }
    out.push_back({Token::Kind::atom, atom, line, start_col});
  }
  out.push_back({Token::Kind::eof, "", line, col});
  return out;
}

bool is_integer_atom(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = s[0] == '-' ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : tokens_(tokenize(text)) {}

  Program parse() {
    Program p;
    parse_expr(p);
    expect(Token::Kind::eof, "trailing input after program");
    if (p.nodes.empty()) {
      throw ParseError(ParseErrorKind::syntax, 1, 1, "empty program");
    }
    return p;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  void expect(Token::Kind k, const std::string& msg) {
    if (peek().kind != k) {
      throw ParseError(ParseErrorKind::syntax, peek().line, peek().col, msg);
    }
    next();
  }

  // returns index of the node produced
  int parse_expr(Program& p) {
    const Token& open = peek();
    if (open.kind != Token::Kind::lparen) {
      throw ParseError(ParseErrorKind::syntax, open.line, open.col,
                       "expected '('");
    }
    next();
    const Token& head = peek();
    if (head.kind != Token::Kind::atom) {
      throw ParseError(ParseErrorKind::syntax, head.line, head.col,
                       "expected operation name");
    }
    const std::string op_name = head.text;
    const int op_line = head.line;
    const int op_col = head.col;
    next();
    const OpSig* sig = find_op(op_name);
    if (!sig) {
      throw ParseError(ParseErrorKind::unknown_op, op_line, op_col,
                       "unknown op '" + op_name + "'");
    }

    ProgNode node;
    node.op = op_name;
    std::vector<ValType> input_types;
    for (const auto& arg : sig->args) {
      if (peek().kind == Token::Kind::rparen) {
        if (arg.optional) break;
        throw ParseError(ParseErrorKind::arity, peek().line, peek().col,
                         "op '" + op_name + "' is missing arguments");
      }
      if (arg.is_literal) {
        const Token& tok = peek();
        if (tok.kind != Token::Kind::atom) {
          throw ParseError(ParseErrorKind::type, tok.line, tok.col,
                           "op '" + op_name + "' expects a literal here");
        }
        if (!literal_vocab(arg.lit).count(tok.text)) {
          throw ParseError(ParseErrorKind::type, tok.line, tok.col,
                           "'" + tok.text + "' is not a valid literal for '" +
                               op_name + "'");
        }
        node.literals.push_back(tok.text);
        next();
      } else {
        // frame slots also accept a bare integer literal
        if (peek().kind == Token::Kind::atom && is_integer_atom(peek().text) &&
            arg.types.size() == 1 && arg.types[0] == ValType::frame) {
          ProgNode lit_node;
          lit_node.op = "#frame";
          lit_node.literals.push_back(peek().text);
          lit_node.result = ValType::frame;
          next();
          p.nodes.push_back(lit_node);
          node.inputs.push_back(static_cast<int>(p.nodes.size()) - 1);
          input_types.push_back(ValType::frame);
          continue;
        }
        const Token& tok = peek();
        const int child = parse_expr(p);
        const ValType child_type = p.nodes[static_cast<std::size_t>(child)].result;
        if (std::find(arg.types.begin(), arg.types.end(), child_type) ==
            arg.types.end()) {
          throw ParseError(ParseErrorKind::type, tok.line, tok.col,
                           "op '" + op_name + "' got " + to_string(child_type) +
                               ", expected " + to_string(arg.types[0]));
        }
        node.inputs.push_back(child);
        input_types.push_back(child_type);
      }
    }
    if (peek().kind == Token::Kind::eof) {
      throw ParseError(ParseErrorKind::syntax, peek().line, peek().col,
                       "unexpected end of input, missing ')'");
    }
    if (peek().kind != Token::Kind::rparen) {
      throw ParseError(ParseErrorKind::arity, peek().line, peek().col,
                       "too many arguments for op '" + op_name + "'");
    }
    next();

    node.result = sig->ret;
    if (sig->polymorphic && !input_types.empty()) {
      node.result = input_types[0] == ValType::objects ? ValType::object
                                                       : ValType::event;
    }
    p.nodes.push_back(node);
    return static_cast<int>(p.nodes.size()) - 1;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

void print_node(const Program& p, int index, std::ostream& os) {
  const ProgNode& node = p.nodes[static_cast<std::size_t>(index)];
  if (node.op == "#frame") {
    os << node.literals[0];
    return;
  }
  os << "(" << node.op;
  const OpSig* sig = find_op(node.op);
  std::size_t vi = 0, li = 0;
  for (const auto& arg : sig->args) {
    if (arg.is_literal) {
      if (li < node.literals.size()) {
        os << " " << node.literals[li++];
      }
    } else {
      if (vi < node.inputs.size()) {
        os << " ";
        print_node(p, node.inputs[vi++], os);
      }
    }
  }
  os << ")";
}

}  // namespace

Program parse_program(const std::string& text) { return Parser(text).parse(); }

Program subprogram(const Program& p, int node_index) {
  std::vector<bool> needed(p.nodes.size(), false);
  std::vector<int> stack = {node_index};
  while (!stack.empty()) {
    const int k = stack.back();
    stack.pop_back();
    if (needed[static_cast<std::size_t>(k)]) continue;
    needed[static_cast<std::size_t>(k)] = true;
    for (int in : p.nodes[static_cast<std::size_t>(k)].inputs) {
      stack.push_back(in);
    }
  }
  Program out;
  std::vector<int> remap(p.nodes.size(), -1);
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    if (!needed[i]) continue;
    ProgNode node = p.nodes[i];
    for (auto& in : node.inputs) in = remap[static_cast<std::size_t>(in)];
    remap[i] = static_cast<int>(out.nodes.size());
    out.nodes.push_back(std::move(node));
  }
  return out;
}

std::string print_program(const Program& p) {
  if (p.nodes.empty()) return "";
  std::ostringstream os;
  print_node(p, static_cast<int>(p.nodes.size()) - 1, os);
  return os.str();
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

PropertiesView PropertiesView::from_roster(
    const std::vector<ObjectSpec>& roster) {
  PropertiesView v;
  for (const auto& o : roster) {
    v.mass[o.id] = o.mass;
    if (o.charge != ChargeSign::neutral) v.charged.insert(o.id);
  }
  for (const auto& a : roster) {
    for (const auto& b : roster) {
      if (a.id >= b.id) continue;
      const double qq = charge_value(a.charge) * charge_value(b.charge);
      ChargeRel rel = ChargeRel::none;
      if (qq > 0) rel = ChargeRel::same;
      if (qq < 0) rel = ChargeRel::opposite;
      v.rel[ordered_pair(a.id, b.id)] = rel;
    }
  }
  return v;
}

PropertiesView PropertiesView::from_graph(const PropertyGraph& g,
                                          const std::vector<ObjectSpec>& roster) {
  PropertiesView v;
  for (const auto& o : roster) {
    auto it = g.node_mass.find(o.id);
    v.mass[o.id] = it != g.node_mass.end() ? it->second.mass : MassLevel::light;
  }
  for (const auto& a : roster) {
    for (const auto& b : roster) {
      if (a.id >= b.id) continue;
      auto rel = g.relation(a.id, b.id);
      const ChargeRel r = rel.value_or(ChargeRel::none);
      v.rel[ordered_pair(a.id, b.id)] = r;
      if (r != ChargeRel::none) {
        v.charged.insert(a.id);
        v.charged.insert(b.id);
      }
    }
  }
  return v;
}

ChargeRel PropertiesView::relation(int a, int b) const {
  auto it = rel.find(ordered_pair(a, b));
  return it != rel.end() ? it->second : ChargeRel::none;
}

bool moving_predicate(const BodyState& state, double threshold) {
  return state.velocity.norm() > threshold;
}

std::string direction_name(const Vec2& velocity, double threshold) {
  if (velocity.norm() <= threshold) return "stationary";
  static const char* names[8] = {"right",  "up-right",  "up",    "up-left",
                                 "left",   "down-left", "down",  "down-right"};
  const double angle = std::atan2(velocity.y, velocity.x);  // (-pi, pi]
  const double sector = angle / (M_PI / 4.0);               // 45 degree octants
  int idx = static_cast<int>(std::lround(sector));
  idx = ((idx % 8) + 8) % 8;
  return names[idx];
}

namespace {

struct Executor {
  const World& world;
  const Program& program;
  std::vector<Value> slots;

  const SceneRecord& target(int idx) const {
    if (!world.target) {
      throw ExecError(ExecErrorKind::bad_input, idx, "world has no target");
    }
    return *world.target;
  }

  const ObjectSpec& spec(int id, int idx) const {
    const int i = target(idx).index_of(id);
    if (i < 0) {
      throw ExecError(ExecErrorKind::bad_input, idx,
                      "object " + std::to_string(id) + " not in target");
    }
    return target(idx).objects[static_cast<std::size_t>(i)];
  }

  int clamp_frame(int frame, int idx) const {
    const int n = target(idx).frame_count();
    if (frame < 0 || frame >= n) {
      throw ExecError(ExecErrorKind::bad_input, idx,
                      "frame " + std::to_string(frame) + " out of range");
    }
    return frame;
  }

  int event_frame(const EventVal& e, int idx) const {
    switch (e.special) {
      case EventVal::Special::video_start:
        return 0;
      case EventVal::Special::video_end:
        return target(idx).frame_count() - 1;
      default:
        return e.rec.frame;
    }
  }

  std::string attribute_of(const ObjectSpec& o, const std::string& head) const {
    if (head == "color") return to_string(o.color);
    if (head == "shape") return to_string(o.shape);
    return to_string(o.material);
  }

  Value eval(int idx) {
    const ProgNode& node = program.nodes[static_cast<std::size_t>(idx)];
    const auto& op = node.op;
    auto in = [&](std::size_t k) -> const Value& {
      return slots[static_cast<std::size_t>(node.inputs[k])];
    };

    if (op == "#frame") {
      return FrameVal{clamp_frame(std::stoi(node.literals[0]), idx)};
    }
    if (op == "objects") {
      ObjectSetVal v;
      for (const auto& o : target(idx).objects) v.ids.push_back(o.id);
      std::sort(v.ids.begin(), v.ids.end());
      return v;
    }
    if (op == "events") return EventListVal{target(idx).events};
    if (op == "unseen_events") {
      if (!world.future) {
        throw ExecError(ExecErrorKind::missing_future, idx,
                        "world has no future record");
      }
      return EventListVal{world.future->events};
    }
    if (op == "start") {
      EventVal e;
      e.special = EventVal::Special::video_start;
      return e;
    }
    if (op == "end") {
      EventVal e;
      e.special = EventVal::Special::video_end;
      return e;
    }
    if (op == "filter_heavy" || op == "filter_light") {
      const auto want = op == "filter_heavy" ? MassLevel::heavy : MassLevel::light;
      ObjectSetVal out;
      for (int id : std::get<ObjectSetVal>(in(0)).ids) {
        auto it = world.props.mass.find(id);
        if (it != world.props.mass.end() && it->second == want) {
          out.ids.push_back(id);
        }
      }
      return out;
    }
    if (op == "filter_charged" || op == "filter_uncharged") {
      const bool want = op == "filter_charged";
      ObjectSetVal out;
      for (int id : std::get<ObjectSetVal>(in(0)).ids) {
        if ((world.props.charged.count(id) > 0) == want) out.ids.push_back(id);
      }
      return out;
    }
    if (op == "filter_static_attr") {
      const std::string& attr = node.literals[0];
      ObjectSetVal out;
      for (int id : std::get<ObjectSetVal>(in(0)).ids) {
        const auto& o = spec(id, idx);
        if (to_string(o.color) == attr || to_string(o.shape) == attr ||
            to_string(o.material) == attr) {
          out.ids.push_back(id);
        }
      }
      return out;
    }
    if (op == "filter_dynamic_attr") {
      const bool want_moving = node.literals[0] == "moving";
      const int frame = clamp_frame(std::get<FrameVal>(in(1)).frame, idx);
      ObjectSetVal out;
      for (int id : std::get<ObjectSetVal>(in(0)).ids) {
        const auto& st = target(idx).state_of(id, frame);
        if (moving_predicate(st, world.moving_threshold) == want_moving) {
          out.ids.push_back(id);
        }
      }
      return out;
    }
    if (op == "filter_event") {
      const auto& evs = std::get<EventListVal>(in(0)).events;
      const auto& ids = std::get<ObjectSetVal>(in(1)).ids;
      std::optional<EventKind> kind;
      if (!node.literals.empty()) {
        kind = event_kind_from_string(node.literals[0]);
      }
      EventListVal out;
      for (const auto& e : evs) {
        if (kind && e.kind != *kind) continue;
        bool touches = false;
        for (int id : ids) {
          if (e.involves(id)) {
            touches = true;
            break;
          }
        }
        if (touches) out.events.push_back(e);
      }
      return out;
    }
    if (op == "get_col_partner") {
      const auto& e = std::get<EventVal>(in(0));
      const int id = std::get<ObjectVal>(in(1)).id;
      if (e.special != EventVal::Special::none ||
          e.rec.kind != EventKind::collision || !e.rec.involves(id)) {
        throw ExecError(ExecErrorKind::bad_input, idx,
                        "not a collision of that object");
      }
      return ObjectVal{e.rec.participants[0] == id ? e.rec.participants[1]
                                                   : e.rec.participants[0]};
    }
    if (op == "filter_before" || op == "filter_after") {
      const auto& evs = std::get<EventListVal>(in(0)).events;
      const int pivot = event_frame(std::get<EventVal>(in(1)), idx);
      const bool before = op == "filter_before";
      EventListVal out;
      for (const auto& e : evs) {
        if (before ? e.frame < pivot : e.frame > pivot) out.events.push_back(e);
      }
      return out;
    }
    if (op == "filter_order") {
      auto evs = std::get<EventListVal>(in(0)).events;
      if (evs.empty()) {
        throw ExecError(ExecErrorKind::empty_selection, idx,
                        "no event at requested order");
      }
      std::stable_sort(evs.begin(), evs.end(),
                       [](const EventRecord& a, const EventRecord& b) {
                         return a.frame < b.frame;
                       });
      const std::string& order = node.literals[0];
      std::size_t k = 0;
      if (order == "second") k = 1;
      if (order == "last") k = evs.size() - 1;
      if (k >= evs.size()) {
        throw ExecError(ExecErrorKind::empty_selection, idx,
                        "no event at requested order");
      }
      EventVal out;
      out.rec = evs[k];
      return out;
    }
    if (op == "get_frame") {
      return FrameVal{event_frame(std::get<EventVal>(in(0)), idx)};
    }
    if (op == "unique") {
      if (type_of(in(0)) == ValType::objects) {
        const auto& ids = std::get<ObjectSetVal>(in(0)).ids;
        if (ids.size() != 1) {
          throw ExecError(ExecErrorKind::non_unique_referent, idx,
                          "non-unique referent (" + std::to_string(ids.size()) +
                              " objects)");
        }
        return ObjectVal{ids[0]};
      }
      const auto& evs = std::get<EventListVal>(in(0)).events;
      if (evs.size() != 1) {
        throw ExecError(ExecErrorKind::non_unique_referent, idx,
                        "non-unique referent (" + std::to_string(evs.size()) +
                            " events)");
      }
      EventVal out;
      out.rec = evs[0];
      return out;
    }
    if (op == "counterfactual_mass_heavy" || op == "counterfactual_mass_light" ||
        op == "counterfactual_uncharged" ||
        op == "counterfactual_opposite_charged") {
      static const std::map<std::string, std::string> edits = {
          {"counterfactual_mass_heavy", "mass_heavy"},
          {"counterfactual_mass_light", "mass_light"},
          {"counterfactual_uncharged", "uncharged"},
          {"counterfactual_opposite_charged", "opposite_charged"}};
      const int id = std::get<ObjectVal>(in(0)).id;
      auto it = world.counterfactual.find({edits.at(op), id});
      if (it == world.counterfactual.end() || !it->second) {
        throw ExecError(ExecErrorKind::missing_counterfactual, idx,
                        "missing counterfactual world (" + edits.at(op) +
                            ", object " + std::to_string(id) + ")");
      }
      return EventListVal{it->second->events};
    }
    if (op == "query_attribute") {
      const int id = std::get<ObjectVal>(in(0)).id;
      return AttrVal{attribute_of(spec(id, idx), node.literals[0])};
    }
    if (op == "query_both_attribute") {
      const auto& ids = std::get<ObjectSetVal>(in(0)).ids;
      if (ids.size() != 2) {
        throw ExecError(ExecErrorKind::non_unique_referent, idx,
                        "expected exactly two objects, got " +
                            std::to_string(ids.size()));
      }
      const int a = std::min(ids[0], ids[1]);
      const int b = std::max(ids[0], ids[1]);
      return StringVal{attribute_of(spec(a, idx), node.literals[0]) + " and " +
                       attribute_of(spec(b, idx), node.literals[0])};
    }
    if (op == "query_direction") {
      const int id = std::get<ObjectVal>(in(0)).id;
      const int frame = clamp_frame(std::get<FrameVal>(in(1)).frame, idx);
      return AttrVal{direction_name(target(idx).state_of(id, frame).velocity,
                                    world.moving_threshold)};
    }
    if (op == "is_heavier" || op == "is_lighter") {
      const int a = std::get<ObjectVal>(in(0)).id;
      const int b = std::get<ObjectVal>(in(1)).id;
      auto mass = [&](int id) {
        auto it = world.props.mass.find(id);
        if (it == world.props.mass.end()) {
          throw ExecError(ExecErrorKind::bad_input, idx,
                          "no mass label for object " + std::to_string(id));
        }
        return mass_value(it->second);
      };
      const bool result = op == "is_heavier" ? mass(a) > mass(b)
                                             : mass(a) < mass(b);
      return BoolVal{result};
    }
    if (op == "is_same_charged" || op == "is_opposite_charged") {
      const int a = std::get<ObjectVal>(in(0)).id;
      const int b = std::get<ObjectVal>(in(1)).id;
      const ChargeRel want =
          op == "is_same_charged" ? ChargeRel::same : ChargeRel::opposite;
      return BoolVal{world.props.relation(a, b) == want};
    }
    if (op == "count") {
      if (type_of(in(0)) == ValType::objects) {
        return IntVal{
            static_cast<long long>(std::get<ObjectSetVal>(in(0)).ids.size())};
      }
      return IntVal{
          static_cast<long long>(std::get<EventListVal>(in(0)).events.size())};
    }
    if (op == "exist") {
      if (type_of(in(0)) == ValType::objects) {
        return BoolVal{!std::get<ObjectSetVal>(in(0)).ids.empty()};
      }
      return BoolVal{!std::get<EventListVal>(in(0)).events.empty()};
    }
    if (op == "belong_to") {
      const auto& e = std::get<EventVal>(in(0));
      if (e.special != EventVal::Special::none) return BoolVal{false};
      for (const auto& cand : std::get<EventListVal>(in(1)).events) {
        if (cand.kind == e.rec.kind && cand.frame == e.rec.frame &&
            cand.frame_end == e.rec.frame_end) {
          auto a = cand.participants;
          auto b = e.rec.participants;
          std::sort(a.begin(), a.end());
          std::sort(b.begin(), b.end());
          if (a == b) return BoolVal{true};
        }
      }
      return BoolVal{false};
    }
    if (op == "negate") {
      return BoolVal{!std::get<BoolVal>(in(0)).value};
    }
    throw ExecError(ExecErrorKind::bad_input, idx, "unimplemented op " + op);
  }
};

}  // namespace

std::string to_string(ExecErrorKind k) {
  switch (k) {
    case ExecErrorKind::non_unique_referent: return "non_unique_referent";
    case ExecErrorKind::missing_counterfactual: return "missing_counterfactual";
    case ExecErrorKind::missing_future: return "missing_future";
    case ExecErrorKind::empty_selection: return "empty_selection";
    case ExecErrorKind::bad_input: return "bad_input";
    case ExecErrorKind::type_mismatch: return "type_mismatch";
  }
  return "?";
}

std::vector<Value> execute_all(const Program& program, const World& world) {
  if (program.nodes.empty()) {
    throw ExecError(ExecErrorKind::bad_input, 0, "empty program");
  }
  Executor ex{world, program, {}};
  ex.slots.reserve(program.nodes.size());
  for (std::size_t i = 0; i < program.nodes.size(); ++i) {
    try {
      ex.slots.push_back(ex.eval(static_cast<int>(i)));
    } catch (const std::bad_variant_access&) {
      throw ExecError(ExecErrorKind::type_mismatch, static_cast<int>(i),
                      "value tag mismatch in op " + program.nodes[i].op);
    }
  }
  return ex.slots;
}

Value execute(const Program& program, const World& world) {
  return execute_all(program, world).back();
}

}  // namespace physq
