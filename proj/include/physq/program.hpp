#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "physq/types.hpp"

namespace physq {

// ---------------------------------------------------------------------------
// Values
// ---------------------------------------------------------------------------

enum class ValType {
  objects,
  events,
  event,
  object,
  integer,
  boolean,
  string,
  frame,
  attribute
};

std::string to_string(ValType t);

struct ObjectSetVal {
  std::vector<int> ids;  // sorted, unique
};
struct EventListVal {
  std::vector<EventRecord> events;
};
struct EventVal {
  enum class Special { none, video_start, video_end };
  Special special = Special::none;
  EventRecord rec;
};
struct ObjectVal {
  int id = 0;
};
struct IntVal {
  long long value = 0;
};
struct BoolVal {
  bool value = false;
};
struct StringVal {
  std::string value;
};
struct FrameVal {
  int frame = 0;
};
struct AttrVal {
  std::string value;
};

using Value = std::variant<ObjectSetVal, EventListVal, EventVal, ObjectVal,
                           IntVal, BoolVal, StringVal, FrameVal, AttrVal>;

ValType type_of(const Value& v);
std::string value_to_answer(const Value& v);  // "yes"/"no", digits, words

// ---------------------------------------------------------------------------
// Programs
// ---------------------------------------------------------------------------

struct ProgNode {
  std::string op;
  std::vector<int> inputs;            // indices of earlier nodes
  std::vector<std::string> literals;  // static args, in order
  ValType result = ValType::objects;  // resolved at parse time
};

struct Program {
  std::vector<ProgNode> nodes;  // evaluation order; last node is the output
  bool operator==(const Program& o) const;
  ValType result_type() const {
    return nodes.empty() ? ValType::objects : nodes.back().result;
  }
};

enum class ParseErrorKind { syntax, unknown_op, arity, type };

struct ParseError : std::runtime_error {
  ParseError(ParseErrorKind kind_, int line_, int col_, const std::string& msg)
      : std::runtime_error("parse error (" + std::to_string(line_) + ":" +
                           std::to_string(col_) + "): " + msg),
        kind(kind_),
        line(line_),
        col(col_) {}
  ParseErrorKind kind;
  int line;
  int col;
};

Program parse_program(const std::string& text);
std::string print_program(const Program& p);

// standalone program computing the value of one node (its dependency cone)
Program subprogram(const Program& p, int node_index);

// ---------------------------------------------------------------------------
// Operation table
// ---------------------------------------------------------------------------

enum class LitClass { static_attr, dynamic_attr, order, event_kind, head_attr };

struct ArgSig {
  bool is_literal = false;
  // value args: acceptable types (one entry normally, two for polymorphic)
  std::vector<ValType> types;
  LitClass lit = LitClass::static_attr;
  bool optional = false;  // only valid for a trailing literal
};

struct OpSig {
  std::string name;
  std::vector<ArgSig> args;
  ValType ret;                 // for polymorphic ops, resolved per call site
  bool polymorphic = false;    // unique/count/exist follow their input
};

const std::vector<OpSig>& op_table();
const OpSig* find_op(const std::string& name);

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

enum class ExecErrorKind {
  non_unique_referent,
  missing_counterfactual,
  missing_future,
  empty_selection,
  bad_input,
  type_mismatch
};

std::string to_string(ExecErrorKind k);

struct ExecError : std::runtime_error {
  ExecError(ExecErrorKind kind_, int op_index_, const std::string& msg)
      : std::runtime_error("execution error at op " +
                           std::to_string(op_index_) + ": " + msg),
        kind(kind_),
        op_index(op_index_) {}
  ExecErrorKind kind;
  int op_index;
};

// Hidden-property view the executor consults; built either from ground truth
// or from an inferred PropertyGraph.
struct PropertiesView {
  std::map<int, MassLevel> mass;
  std::set<int> charged;
  std::map<std::pair<int, int>, ChargeRel> rel;  // normalized pairs

  static PropertiesView from_roster(const std::vector<ObjectSpec>& roster);
  static PropertiesView from_graph(const PropertyGraph& g,
                                   const std::vector<ObjectSpec>& roster);
  ChargeRel relation(int a, int b) const;
};

struct World {
  const SceneRecord* target = nullptr;
  const SceneRecord* future = nullptr;
  // keyed by (edit name, object id); edits: mass_heavy, mass_light,
  // uncharged, opposite_charged
  std::map<std::pair<std::string, int>, const SceneRecord*> counterfactual;
  PropertiesView props;
  double moving_threshold = 0.05;
};

Value execute(const Program& program, const World& world);

// All node values in evaluation order; the last entry is the program result.
std::vector<Value> execute_all(const Program& program, const World& world);

// ||v|| > threshold
bool moving_predicate(const BodyState& state, double threshold = 0.05);

// velocity octant name at a frame: right, up-right, up, ... ; "stationary"
// below the moving threshold
std::string direction_name(const Vec2& velocity, double threshold = 0.05);

}  // namespace physq
