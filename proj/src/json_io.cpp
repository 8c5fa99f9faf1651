#include "physq/json_io.hpp"

#include <fstream>
#include <sstream>

namespace physq {

void to_json(json& j, const Vec2& v) { j = json::array({v.x, v.y}); }

void from_json(const json& j, Vec2& v) {
  v.x = j.at(0).get<double>();
  v.y = j.at(1).get<double>();
}

void to_json(json& j, const ObjectSpec& o) {
  j = json{{"id", o.id},
           {"color", to_string(o.color)},
           {"shape", to_string(o.shape)},
           {"material", to_string(o.material)},
           {"mass", to_string(o.mass)},
           {"charge", to_string(o.charge)}};
}

void from_json(const json& j, ObjectSpec& o) {
  o.id = j.at("id").get<int>();
  o.color = color_from_string(j.at("color").get<std::string>());
  o.shape = shape_from_string(j.at("shape").get<std::string>());
  o.material = material_from_string(j.at("material").get<std::string>());
  o.mass = mass_from_string(j.at("mass").get<std::string>());
  o.charge = charge_from_string(j.at("charge").get<std::string>());
}

void to_json(json& j, const BodyState& s) {
  j = json{{"position", s.position},
           {"velocity", s.velocity},
           {"radius", s.radius}};
}

void from_json(const json& j, BodyState& s) {
  s.position = j.at("position").get<Vec2>();
  s.velocity = j.at("velocity").get<Vec2>();
  s.radius = j.at("radius").get<double>();
}

void to_json(json& j, const EventRecord& e) {
  j = json{{"kind", to_string(e.kind)},
           {"participants", e.participants},
           {"frame", e.frame},
           {"frame_end", e.frame_end}};
}

void from_json(const json& j, EventRecord& e) {
  e.kind = event_kind_from_string(j.at("kind").get<std::string>());
  e.participants = j.at("participants").get<std::vector<int>>();
  e.frame = j.at("frame").get<int>();
  e.frame_end = j.at("frame_end").get<int>();
}

void to_json(json& j, const ContactRecord& c) {
  j = json{{"frame", c.frame}, {"a", c.a}, {"b", c.b}};
}

void from_json(const json& j, ContactRecord& c) {
  c.frame = j.at("frame").get<int>();
  c.a = j.at("a").get<int>();
  c.b = j.at("b").get<int>();
}

void to_json(json& j, const WallContact& c) {
  j = json{{"frame", c.frame}, {"id", c.id}};
}

void from_json(const json& j, WallContact& c) {
  c.frame = j.at("frame").get<int>();
  c.id = j.at("id").get<int>();
}

void to_json(json& j, const SceneRecord& r) {
  j = json{{"objects", r.objects},
           {"frames", r.frames},
           {"duration_s", r.duration_s},
           {"fps", r.fps},
           {"kind", to_string(r.kind)},
           {"events", r.events},
           {"contacts", r.contacts},
           {"wall_contacts", r.wall_contacts}};
}

void from_json(const json& j, SceneRecord& r) {
  r.objects = j.at("objects").get<std::vector<ObjectSpec>>();
  r.frames = j.at("frames").get<std::vector<std::vector<BodyState>>>();
  r.duration_s = j.at("duration_s").get<double>();
  r.fps = j.at("fps").get<int>();
  r.kind = record_kind_from_string(j.at("kind").get<std::string>());
  r.events = j.at("events").get<std::vector<EventRecord>>();
  r.contacts = j.value("contacts", std::vector<ContactRecord>{});
  r.wall_contacts = j.value("wall_contacts", std::vector<WallContact>{});
}

void to_json(json& j, const VideoSet& s) {
  j = json{{"roster", s.roster},
           {"target", s.target},
           {"references", s.references},
           {"future", s.future}};
}

void from_json(const json& j, VideoSet& s) {
  s.roster = j.at("roster").get<std::vector<ObjectSpec>>();
  s.target = j.at("target").get<SceneRecord>();
  const auto& refs = j.at("references");
  if (refs.size() != s.references.size()) {
    throw std::invalid_argument("video set needs exactly 4 references");
  }
  for (std::size_t i = 0; i < s.references.size(); ++i) {
    s.references[i] = refs.at(i).get<SceneRecord>();
  }
  s.future = j.at("future").get<SceneRecord>();
}

void to_json(json& j, const PropertyGraph& g) {
  json nodes = json::object();
  for (const auto& [id, label] : g.node_mass) {
    nodes[std::to_string(id)] =
        json{{"mass", to_string(label.mass)}, {"confidence", label.confidence}};
  }
  json edges = json::array();
  for (const auto& [key, edge] : g.edge_charge) {
    edges.push_back(json{{"a", key.first},
                         {"b", key.second},
                         {"rel", to_string(edge.rel)},
                         {"confidence", edge.confidence}});
  }
  j = json{{"node_mass", nodes}, {"edge_charge", edges}};
}

void from_json(const json& j, PropertyGraph& g) {
  g.node_mass.clear();
  g.edge_charge.clear();
  for (const auto& [key, value] : j.at("node_mass").items()) {
    MassLabel label;
    label.mass = mass_from_string(value.at("mass").get<std::string>());
    label.confidence = value.value("confidence", 1.0);
    g.node_mass[std::stoi(key)] = label;
  }
  for (const auto& e : j.at("edge_charge")) {
    ChargeEdge edge;
    edge.rel = charge_rel_from_string(e.at("rel").get<std::string>());
    edge.confidence = e.value("confidence", 1.0);
    g.edge_charge[ordered_pair(e.at("a").get<int>(), e.at("b").get<int>())] =
        edge;
  }
}

void to_json(json& j, const Choice& c) {
  j = json{{"text", c.text}, {"program", c.program}, {"truth", c.truth}};
}

void from_json(const json& j, Choice& c) {
  c.text = j.at("text").get<std::string>();
  c.program = j.at("program").get<std::string>();
  c.truth = j.at("truth").get<bool>();
}

void to_json(json& j, const Question& q) {
  j = json{{"id", q.id},
           {"text", q.text},
           {"qtype", to_string(q.qtype)},
           {"template_id", q.template_id},
           {"program", q.program},
           {"choices", q.choices},
           {"answer", q.answer}};
}

void from_json(const json& j, Question& q) {
  q.id = j.at("id").get<std::string>();
  q.text = j.at("text").get<std::string>();
  q.qtype = question_type_from_string(j.at("qtype").get<std::string>());
  q.template_id = j.value("template_id", std::string{});
  q.program = j.at("program").get<std::string>();
  q.choices = j.value("choices", std::vector<Choice>{});
  q.answer = j.value("answer", std::string{});
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  json j;
  in >> j;
  return j;
}

void write_json_file(const std::filesystem::path& path, const json& j,
                     int indent) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << j.dump(indent) << "\n";
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  for (int shift = 60; shift >= 0; shift -= 4) {
    os << ((v >> shift) & 0xf);
  }
  return os.str();
}

}  // namespace physq
