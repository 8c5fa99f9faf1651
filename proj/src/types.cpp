#include "physq/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace physq {

namespace {

template <typename E, std::size_t N>
E lookup(const std::array<std::pair<const char*, E>, N>& table,
         const std::string& s, const char* what) {
  for (const auto& [name, value] : table) {
    if (s == name) return value;
  }
  throw std::invalid_argument(std::string("unknown ") + what + ": '" + s + "'");
}

constexpr std::array<std::pair<const char*, Color>, 8> kColorNames = {{
    {"gray", Color::gray},
    {"red", Color::red},
    {"blue", Color::blue},
    {"green", Color::green},
    {"brown", Color::brown},
    {"cyan", Color::cyan},
    {"purple", Color::purple},
    {"yellow", Color::yellow},
}};

constexpr std::array<std::pair<const char*, Shape>, 3> kShapeNames = {{
    {"cube", Shape::cube},
    {"sphere", Shape::sphere},
    {"cylinder", Shape::cylinder},
}};

constexpr std::array<std::pair<const char*, Material>, 2> kMaterialNames = {{
    {"metal", Material::metal},
    {"rubber", Material::rubber},
}};

constexpr std::array<std::pair<const char*, MassLevel>, 2> kMassNames = {{
    {"light", MassLevel::light},
    {"heavy", MassLevel::heavy},
}};

constexpr std::array<std::pair<const char*, ChargeSign>, 3> kChargeNames = {{
    {"neutral", ChargeSign::neutral},
    {"positive", ChargeSign::positive},
    {"negative", ChargeSign::negative},
}};

constexpr std::array<std::pair<const char*, ChargeRel>, 3> kRelNames = {{
    {"same", ChargeRel::same},
    {"opposite", ChargeRel::opposite},
    {"none", ChargeRel::none},
}};

constexpr std::array<std::pair<const char*, EventKind>, 5> kEventNames = {{
    {"in", EventKind::enter},
    {"out", EventKind::exit},
    {"collision", EventKind::collision},
    {"attraction", EventKind::attraction},
    {"repulsion", EventKind::repulsion},
}};

constexpr std::array<std::pair<const char*, RecordKind>, 3> kRecordNames = {{
    {"target", RecordKind::target},
    {"reference", RecordKind::reference},
    {"target_future", RecordKind::target_future},
}};

constexpr std::array<std::pair<const char*, QuestionType>, 4> kQTypeNames = {{
    {"factual", QuestionType::factual},
    {"predictive", QuestionType::predictive},
    {"counterfactual_mass", QuestionType::counterfactual_mass},
    {"counterfactual_charge", QuestionType::counterfactual_charge},
}};

template <typename E, std::size_t N>
std::string name_of(const std::array<std::pair<const char*, E>, N>& table, E v) {
  for (const auto& [name, value] : table) {
    if (v == value) return name;
  }
  return "?";
}

}  // namespace

std::string to_string(Color c) { return name_of(kColorNames, c); }
std::string to_string(Shape s) { return name_of(kShapeNames, s); }
std::string to_string(Material m) { return name_of(kMaterialNames, m); }
std::string to_string(MassLevel m) { return name_of(kMassNames, m); }
std::string to_string(ChargeSign c) { return name_of(kChargeNames, c); }
std::string to_string(ChargeRel r) { return name_of(kRelNames, r); }
std::string to_string(EventKind k) { return name_of(kEventNames, k); }
std::string to_string(RecordKind k) { return name_of(kRecordNames, k); }
std::string to_string(QuestionType t) { return name_of(kQTypeNames, t); }

Color color_from_string(const std::string& s) {
  return lookup(kColorNames, s, "color");
}
Shape shape_from_string(const std::string& s) {
  return lookup(kShapeNames, s, "shape");
}
Material material_from_string(const std::string& s) {
  return lookup(kMaterialNames, s, "material");
}
MassLevel mass_from_string(const std::string& s) {
  return lookup(kMassNames, s, "mass");
}
ChargeSign charge_from_string(const std::string& s) {
  return lookup(kChargeNames, s, "charge");
}
ChargeRel charge_rel_from_string(const std::string& s) {
  return lookup(kRelNames, s, "charge relation");
}
EventKind event_kind_from_string(const std::string& s) {
  return lookup(kEventNames, s, "event kind");
}
RecordKind record_kind_from_string(const std::string& s) {
  return lookup(kRecordNames, s, "record kind");
}
QuestionType question_type_from_string(const std::string& s) {
  return lookup(kQTypeNames, s, "question type");
}

bool EventRecord::involves(int id) const {
  return std::find(participants.begin(), participants.end(), id) !=
         participants.end();
}

int SceneRecord::index_of(int id) const {
  for (std::size_t i = 0; i < objects.size(); ++i) {
    if (objects[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

const BodyState& SceneRecord::state_of(int id, int frame) const {
  const int idx = index_of(id);
  if (idx < 0) throw std::out_of_range("object id not in record");
  return frames.at(static_cast<std::size_t>(frame))[static_cast<std::size_t>(idx)];
}

const ObjectSpec* VideoSet::find(int id) const {
  for (const auto& o : roster) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

std::optional<ChargeRel> PropertyGraph::relation(int a, int b) const {
  auto it = edge_charge.find(ordered_pair(a, b));
  if (it == edge_charge.end()) return std::nullopt;
  return it->second.rel;
}

bool PropertyGraph::labels_equal(const PropertyGraph& o) const {
  if (node_mass.size() != o.node_mass.size() ||
      edge_charge.size() != o.edge_charge.size()) {
    return false;
  }
  for (const auto& [id, label] : node_mass) {
    auto it = o.node_mass.find(id);
    if (it == o.node_mass.end() || it->second.mass != label.mass) return false;
  }
  for (const auto& [key, edge] : edge_charge) {
    auto it = o.edge_charge.find(key);
    if (it == o.edge_charge.end() || it->second.rel != edge.rel) return false;
  }
  return true;
}

bool charge_edges_realizable(const PropertyGraph& g) {
  // Nodes touched by a same/opposite edge must be charged; 2-color them with
  // parity constraints (same -> equal sign, opposite -> flipped sign). A
  // "none" edge between two forced-charged nodes is unrealizable.
  std::map<int, int> sign;  // +1 / -1 once assigned
  std::map<int, std::vector<std::pair<int, int>>> adj;  // id -> (peer, parity)
  std::set<int> forced;
  for (const auto& [key, edge] : g.edge_charge) {
    if (edge.rel == ChargeRel::none) continue;
    const int parity = edge.rel == ChargeRel::same ? 1 : -1;
    adj[key.first].push_back({key.second, parity});
    adj[key.second].push_back({key.first, parity});
    forced.insert(key.first);
    forced.insert(key.second);
  }
  for (int start : forced) {
    if (sign.count(start)) continue;
    sign[start] = 1;
    std::vector<int> stack = {start};
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (const auto& [v, parity] : adj[u]) {
        const int want = sign[u] * parity;
        auto it = sign.find(v);
        if (it == sign.end()) {
          sign[v] = want;
          stack.push_back(v);
        } else if (it->second != want) {
          return false;
        }
      }
    }
  }
  for (const auto& [key, edge] : g.edge_charge) {
    if (edge.rel != ChargeRel::none) continue;
    if (forced.count(key.first) && forced.count(key.second)) return false;
  }
  return true;
}

namespace {

std::string id_list(const std::vector<int>& ids) {
  std::ostringstream os;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) os << ",";
    os << ids[i];
  }
  return os.str();
}

void validate_record(const SceneRecord& rec, const std::string& label,
                     std::vector<std::string>& out) {
  const int expected =
      static_cast<int>(std::lround(rec.duration_s * rec.fps));
  if (rec.frame_count() != expected) {
    out.push_back(label + " frame count " + std::to_string(rec.frame_count()) +
                  " != round(duration*fps) " + std::to_string(expected));
  }
  for (std::size_t f = 0; f < rec.frames.size(); ++f) {
    if (rec.frames[f].size() != rec.objects.size()) {
      out.push_back(label + " frame " + std::to_string(f) +
                    " has wrong state count");
      break;
    }
  }
  for (const auto& ev : rec.events) {
    const bool pair_event = ev.is_interaction();
    if (pair_event && ev.participants.size() != 2) {
      out.push_back(label + " event " + to_string(ev.kind) +
                    " needs 2 participants, has " +
                    std::to_string(ev.participants.size()));
    }
    if (!pair_event && ev.participants.size() != 1) {
      out.push_back(label + " event " + to_string(ev.kind) +
                    " needs 1 participant, has " +
                    std::to_string(ev.participants.size()));
    }
    for (int id : ev.participants) {
      if (!rec.has_object(id)) {
        out.push_back(label + " event references unknown object id " +
                      std::to_string(id));
      }
    }
    if (ev.frame < 0 || ev.frame >= rec.frame_count() || ev.frame_end < ev.frame ||
        ev.frame_end >= rec.frame_count()) {
      out.push_back(label + " event has out-of-range frames [" +
                    std::to_string(ev.frame) + "," +
                    std::to_string(ev.frame_end) + "]");
    }
  }
}

}  // namespace

std::vector<std::string> validate_video_set(const VideoSet& set) {
  std::vector<std::string> out;

  std::set<std::tuple<Color, Shape, Material>> triples;
  for (const auto& o : set.roster) {
    if (!triples.insert(o.attribute_triple()).second) {
      out.push_back("duplicate attribute triple for object " +
                    std::to_string(o.id));
    }
  }

  const auto charged = charged_ids(set.roster);
  if (!charged.empty() && charged.size() != 2) {
    out.push_back("charge-pair violation: " + std::to_string(charged.size()) +
                  " charged (ids " + id_list(charged) + ")");
  }

  std::vector<int> heavies;
  for (const auto& o : set.roster) {
    if (o.mass == MassLevel::heavy) heavies.push_back(o.id);
  }
  if (heavies.size() > 1) {
    out.push_back("heavy violation: " + std::to_string(heavies.size()) +
                  " heavy objects (ids " + id_list(heavies) + ")");
  }

  // roster coverage across references
  for (const auto& o : set.roster) {
    bool seen = false;
    for (const auto& ref : set.references) {
      if (ref.has_object(o.id)) {
        seen = true;
        break;
      }
    }
    if (!seen) {
      out.push_back("object " + std::to_string(o.id) +
                    " appears in no reference");
    }
  }

  for (std::size_t r = 0; r < set.references.size(); ++r) {
    const auto& ref = set.references[r];
    bool has_interaction = false;
    for (const auto& ev : ref.events) {
      if (ev.is_interaction()) {
        has_interaction = true;
        break;
      }
    }
    if (!has_interaction) {
      out.push_back("reference " + std::to_string(r) + " lacks interaction");
    }
    for (const auto& o : ref.objects) {
      if (!set.find(o.id)) {
        out.push_back("reference " + std::to_string(r) +
                      " casts unknown object id " + std::to_string(o.id));
      }
    }
  }

  validate_record(set.target, "target", out);
  for (std::size_t r = 0; r < set.references.size(); ++r) {
    validate_record(set.references[r], "reference " + std::to_string(r), out);
  }
  validate_record(set.future, "future", out);

  return out;
}

std::map<int, ChargeSign> canonicalize_charges(
    std::map<int, ChargeSign> assignment) {
  for (const auto& [id, c] : assignment) {
    if (c == ChargeSign::neutral) continue;
    if (c == ChargeSign::negative) {
      for (auto& [id2, c2] : assignment) {
        if (c2 == ChargeSign::positive) {
          c2 = ChargeSign::negative;
        } else if (c2 == ChargeSign::negative) {
          c2 = ChargeSign::positive;
        }
      }
    }
    break;  // decided by the lowest-id charged entry (map is id-ordered)
  }
  return assignment;
}

std::map<int, ChargeSign> realize_signs(const PropertyGraph& g,
                                        const std::vector<int>& ids) {
  std::map<int, ChargeSign> out;
  for (int id : ids) out[id] = ChargeSign::neutral;
  std::map<int, std::vector<std::pair<int, int>>> adj;
  std::set<int> forced;
  for (const auto& [key, edge] : g.edge_charge) {
    if (edge.rel == ChargeRel::none) continue;
    const int parity = edge.rel == ChargeRel::same ? 1 : -1;
    adj[key.first].push_back({key.second, parity});
    adj[key.second].push_back({key.first, parity});
    forced.insert(key.first);
    forced.insert(key.second);
  }
  std::map<int, int> sign;
  for (int start : forced) {
    if (sign.count(start)) continue;
    sign[start] = 1;
    std::vector<int> stack = {start};
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (const auto& [v, parity] : adj[u]) {
        if (!sign.count(v)) {
          sign[v] = sign[u] * parity;
          stack.push_back(v);
        }
      }
    }
  }
  for (const auto& [id, s] : sign) {
    out[id] = s > 0 ? ChargeSign::positive : ChargeSign::negative;
  }
  return canonicalize_charges(out);
}

std::vector<int> charged_ids(const std::vector<ObjectSpec>& roster) {
  std::vector<int> out;
  for (const auto& o : roster) {
    if (o.charge != ChargeSign::neutral) out.push_back(o.id);
  }
  return out;
}

std::optional<int> heavy_id(const std::vector<ObjectSpec>& roster) {
  for (const auto& o : roster) {
    if (o.mass == MassLevel::heavy) return o.id;
  }
  return std::nullopt;
}

}  // namespace physq
