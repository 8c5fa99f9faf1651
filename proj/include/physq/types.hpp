#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "physq/vec2.hpp"

namespace physq {

// ---------------------------------------------------------------------------
// Attribute and property enums
// ---------------------------------------------------------------------------

enum class Color { gray, red, blue, green, brown, cyan, purple, yellow };
enum class Shape { cube, sphere, cylinder };
enum class Material { metal, rubber };
enum class MassLevel { light, heavy };
enum class ChargeSign { neutral, positive, negative };
enum class ChargeRel { same, opposite, none };
enum class EventKind { enter, exit, collision, attraction, repulsion };
enum class RecordKind { target, reference, target_future };
enum class QuestionType {
  factual,
  predictive,
  counterfactual_mass,
  counterfactual_charge
};

inline constexpr std::array<Color, 8> kAllColors = {
    Color::gray, Color::red,  Color::blue,   Color::green,
    Color::brown, Color::cyan, Color::purple, Color::yellow};
inline constexpr std::array<Shape, 3> kAllShapes = {Shape::cube, Shape::sphere,
                                                    Shape::cylinder};
inline constexpr std::array<Material, 2> kAllMaterials = {Material::metal,
                                                          Material::rubber};

std::string to_string(Color c);
std::string to_string(Shape s);
std::string to_string(Material m);
std::string to_string(MassLevel m);
std::string to_string(ChargeSign c);
std::string to_string(ChargeRel r);
std::string to_string(EventKind k);  // "in"/"out"/"collision"/...
std::string to_string(RecordKind k);
std::string to_string(QuestionType t);

Color color_from_string(const std::string& s);
Shape shape_from_string(const std::string& s);
Material material_from_string(const std::string& s);
MassLevel mass_from_string(const std::string& s);
ChargeSign charge_from_string(const std::string& s);
ChargeRel charge_rel_from_string(const std::string& s);
EventKind event_kind_from_string(const std::string& s);
RecordKind record_kind_from_string(const std::string& s);
QuestionType question_type_from_string(const std::string& s);

inline double mass_value(MassLevel m) {
  return m == MassLevel::heavy ? 5.0 : 1.0;
}

inline double charge_value(ChargeSign c) {
  switch (c) {
    case ChargeSign::positive:
      return 1.0;
    case ChargeSign::negative:
      return -1.0;
    default:
      return 0.0;
  }
}

// Collision disc radius per shape; shape affects appearance only, dynamics
// see a disc.
inline double radius_for_shape(Shape s) {
  return s == Shape::cube ? 0.35 : 0.30;
}

// ---------------------------------------------------------------------------
// Domain records
// ---------------------------------------------------------------------------

struct ObjectSpec {
  int id = 0;
  Color color = Color::gray;
  Shape shape = Shape::cube;
  Material material = Material::metal;
  MassLevel mass = MassLevel::light;
  ChargeSign charge = ChargeSign::neutral;

  bool operator==(const ObjectSpec&) const = default;

  std::tuple<Color, Shape, Material> attribute_triple() const {
    return {color, shape, material};
  }
};

struct BodyState {
  Vec2 position;
  Vec2 velocity;
  double radius = 0.3;

  bool operator==(const BodyState&) const = default;
  bool finite() const {
    return position.finite() && velocity.finite() && std::isfinite(radius);
  }
};

struct EventRecord {
  EventKind kind = EventKind::collision;
  std::vector<int> participants;  // 1 id for in/out, 2 for the rest
  int frame = 0;                  // start frame
  int frame_end = 0;              // == frame for instantaneous events

  bool operator==(const EventRecord&) const = default;

  bool involves(int id) const;
  bool is_interaction() const {
    return kind == EventKind::collision || kind == EventKind::attraction ||
           kind == EventKind::repulsion;
  }
};

// Raw pair-contact log entry written by the simulator (sub-frame accurate).
struct ContactRecord {
  int frame = 0;
  int a = 0;
  int b = 0;
  bool operator==(const ContactRecord&) const = default;
};

struct WallContact {
  int frame = 0;
  int id = 0;
  bool operator==(const WallContact&) const = default;
};

struct SceneRecord {
  std::vector<ObjectSpec> objects;               // cast, roster subset
  std::vector<std::vector<BodyState>> frames;    // frames[f][cast index]
  double duration_s = 0.0;
  int fps = 25;
  RecordKind kind = RecordKind::target;
  std::vector<EventRecord> events;
  std::vector<ContactRecord> contacts;
  std::vector<WallContact> wall_contacts;

  bool operator==(const SceneRecord&) const = default;

  int frame_count() const { return static_cast<int>(frames.size()); }
  // index into frames[f] for an object id; -1 if absent
  int index_of(int id) const;
  const BodyState& state_of(int id, int frame) const;
  bool has_object(int id) const { return index_of(id) >= 0; }
};

struct VideoSet {
  std::vector<ObjectSpec> roster;
  SceneRecord target;
  std::array<SceneRecord, 4> references;
  SceneRecord future;

  bool operator==(const VideoSet&) const = default;

  const ObjectSpec* find(int id) const;
};

// ---------------------------------------------------------------------------
// Property graph
// ---------------------------------------------------------------------------

struct MassLabel {
  MassLevel mass = MassLevel::light;
  double confidence = 1.0;
  bool operator==(const MassLabel&) const = default;
};

struct ChargeEdge {
  ChargeRel rel = ChargeRel::none;
  double confidence = 1.0;
  bool operator==(const ChargeEdge&) const = default;
};

inline std::pair<int, int> ordered_pair(int a, int b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

// Nodes carry mass labels, edges pairwise relative charge. Edge keys are
// normalized (a < b), which keeps labels symmetric under pair reversal.
struct PropertyGraph {
  std::map<int, MassLabel> node_mass;
  std::map<std::pair<int, int>, ChargeEdge> edge_charge;

  bool operator==(const PropertyGraph&) const = default;

  std::optional<ChargeRel> relation(int a, int b) const;
  bool labels_equal(const PropertyGraph& o) const;
};

// True iff the same/opposite edges admit a signed {+,-,0} assignment.
bool charge_edges_realizable(const PropertyGraph& g);

// ---------------------------------------------------------------------------
// Questions
// ---------------------------------------------------------------------------

struct Choice {
  std::string text;
  std::string program;  // concrete program text
  bool truth = false;
  bool operator==(const Choice&) const = default;
};

struct Question {
  std::string id;
  std::string text;
  QuestionType qtype = QuestionType::factual;
  std::string template_id;
  std::string program;            // concrete program text
  std::vector<Choice> choices;    // empty for factual
  std::string answer;             // set for factual only

  bool operator==(const Question&) const = default;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Total function: empty result iff every VideoSet invariant holds. Each entry
// names the violated invariant and the offending ids.
std::vector<std::string> validate_video_set(const VideoSet& set);

// Of the two sign-flipped equivalents, returns the one where the lowest-id
// charged object is positive. Neutral-only assignments pass through.
std::map<int, ChargeSign> canonicalize_charges(std::map<int, ChargeSign> assignment);

// Realizes a signed assignment from same/opposite edges, canonical form.
// Objects without a charged edge come out neutral.
std::map<int, ChargeSign> realize_signs(const PropertyGraph& g,
                                        const std::vector<int>& ids);

std::vector<int> charged_ids(const std::vector<ObjectSpec>& roster);
std::optional<int> heavy_id(const std::vector<ObjectSpec>& roster);

}  // namespace physq
