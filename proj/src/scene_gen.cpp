#include "physq/scene_gen.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>

#include "physq/program.hpp"

namespace physq {

void GenConfig::validate() const {
  if (n_objects_min < 1 || n_objects_max < n_objects_min ||
      n_ref_objects_min < 1 || n_ref_objects_max < n_ref_objects_min ||
      !(target_duration_s > 0) || !(future_duration_s > 0) ||
      !(ref_duration_s > 0) || max_resample_attempts < 1 ||
      !(speed_min > 0) || speed_max < speed_min || clearance < 0) {
    throw GenError("generation config out of range");
  }
}

std::vector<ObjectSpec> sample_roster(const GenConfig& cfg, RngStream& rng) {
  cfg.validate();
  const int n = cfg.complex_mode ? rng.uniform_int(6, 8)
                                 : rng.uniform_int(cfg.n_objects_min,
                                                   cfg.n_objects_max);
  std::set<std::tuple<Color, Shape, Material>> used;
  std::vector<ObjectSpec> roster;
  for (int i = 0; i < n; ++i) {
    ObjectSpec o;
    o.id = i;
    do {
      o.color = kAllColors[static_cast<std::size_t>(rng.uniform_int(0, 7))];
      o.shape = kAllShapes[static_cast<std::size_t>(rng.uniform_int(0, 2))];
      o.material =
          kAllMaterials[static_cast<std::size_t>(rng.uniform_int(0, 1))];
    } while (!used.insert(o.attribute_triple()).second);
    roster.push_back(o);
  }

  const bool charged = cfg.complex_mode || rng.bernoulli(0.5);
  if (charged) {
    const int a = rng.uniform_int(0, n - 1);
    int b = a;
    while (b == a) b = rng.uniform_int(0, n - 1);
    const bool same_sign = rng.bernoulli(0.5);
    const int lo = std::min(a, b);
    const int hi = std::max(a, b);
    roster[static_cast<std::size_t>(lo)].charge = ChargeSign::positive;
    roster[static_cast<std::size_t>(hi)].charge =
        same_sign ? ChargeSign::positive : ChargeSign::negative;
  }

  const bool heavy = cfg.complex_mode || rng.bernoulli(0.5);
  if (heavy) {
    roster[static_cast<std::size_t>(rng.uniform_int(0, n - 1))].mass =
        MassLevel::heavy;
  }
  return roster;
}

namespace {

Vec2 random_velocity(RngStream& rng, double lo, double hi) {
  const double speed = rng.uniform(lo, hi);
  const double angle = rng.uniform(0.0, 2.0 * M_PI);
  return {speed * std::cos(angle), speed * std::sin(angle)};
}

// Non-overlapping placement inside the arena; nullopt when it cannot fit.
// spread_limit pulls spawns toward the center, which keeps short videos busy.
std::optional<std::vector<BodyState>> place_cast(
    const std::vector<ObjectSpec>& cast, const GenConfig& cfg,
    const PhysicsConfig& phys, RngStream& rng,
    double spread_limit = 1e9) {
  std::vector<BodyState> states;
  for (const auto& o : cast) {
    BodyState s;
    s.radius = radius_for_shape(o.shape);
    const double bound =
        std::min(phys.arena_half_extent - s.radius - 0.5, spread_limit);
    bool placed = false;
    for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
      s.position = {rng.uniform(-bound, bound), rng.uniform(-bound, bound)};
      placed = true;
      for (const auto& other : states) {
        const double gap = (s.position - other.position).norm() -
                           (s.radius + other.radius);
        if (gap < cfg.clearance) {
          placed = false;
          break;
        }
      }
    }
    if (!placed) return std::nullopt;
    s.velocity = random_velocity(rng, cfg.speed_min, cfg.speed_max);
    states.push_back(s);
  }
  return states;
}

// Retargets states[0] (and a slower states[1]) so the two protagonists are
// near each other and the first one is aimed to intercept the second.
void aim_protagonists(std::vector<BodyState>& states, const GenConfig& cfg,
                      RngStream& rng, bool co_locate_only) {
  if (states.size() < 2) return;
  BodyState& a = states[0];
  BodyState& b = states[1];
  // pull b within engagement distance of a
  const double d = rng.uniform(1.0, 2.4);
  const double angle = rng.uniform(0.0, 2.0 * M_PI);
  b.position = a.position + Vec2{d * std::cos(angle), d * std::sin(angle)};
  if (co_locate_only) return;
  b.velocity = random_velocity(rng, cfg.speed_min, std::min(1.2, cfg.speed_max));
  const double speed = rng.uniform(std::max(cfg.speed_min, 1.2), cfg.speed_max);
  const double eta = d / speed;
  const Vec2 lead = b.position + b.velocity * (0.8 * eta);
  Vec2 dir = lead - a.position;
  const double dn = dir.norm();
  dir = dn > 0 ? dir / dn : Vec2{1.0, 0.0};
  a.velocity = dir * speed;
}

bool inside_arena(const std::vector<BodyState>& states,
                  const PhysicsConfig& phys) {
  for (const auto& s : states) {
    if (std::abs(s.position.x) > phys.arena_half_extent - s.radius ||
        std::abs(s.position.y) > phys.arena_half_extent - s.radius) {
      return false;
    }
  }
  return true;
}

bool overlaps(const std::vector<BodyState>& states, double clearance) {
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = i + 1; j < states.size(); ++j) {
      const double gap = (states[i].position - states[j].position).norm() -
                         (states[i].radius + states[j].radius);
      if (gap < clearance) return true;
    }
  }
  return false;
}

bool has_interaction(const SceneRecord& rec) {
  return std::any_of(rec.events.begin(), rec.events.end(),
                     [](const EventRecord& e) { return e.is_interaction(); });
}

bool has_collision_with(const SceneRecord& rec, int id) {
  return std::any_of(rec.events.begin(), rec.events.end(),
                     [&](const EventRecord& e) {
                       return e.kind == EventKind::collision && e.involves(id);
                     });
}

bool has_charge_event_between(const SceneRecord& rec, int a, int b) {
  return std::any_of(rec.events.begin(), rec.events.end(),
                     [&](const EventRecord& e) {
                       return (e.kind == EventKind::attraction ||
                               e.kind == EventKind::repulsion) &&
                              e.involves(a) && e.involves(b);
                     });
}

}  // namespace

TargetSample sample_target(const std::vector<ObjectSpec>& roster,
                           const GenConfig& cfg, const PhysicsConfig& phys,
                           RngStream& rng) {
  cfg.validate();
  for (int attempt = 0; attempt < cfg.max_resample_attempts; ++attempt) {
    auto states = place_cast(roster, cfg, phys, rng, 3.2);
    if (!states) continue;
    // one aimed encounter seeds the action; walls keep the rest moving
    aim_protagonists(*states, cfg, rng, /*co_locate_only=*/false);
    if (!inside_arena(*states, phys) || overlaps(*states, cfg.clearance)) {
      continue;
    }
    InitialConditions init{roster, *states};
    SceneRecord target = simulate(init, cfg.target_duration_s, phys,
                                  RecordKind::target);
    // quality gate: enough observed interactions to ask about, plus one in
    // the continuation so predictive questions are non-degenerate
    int target_interactions = 0;
    for (const auto& e : target.events) {
      if (e.is_interaction()) ++target_interactions;
    }
    if (target_interactions < 2) continue;
    InitialConditions future_init{roster, target.frames.back()};
    SceneRecord future = simulate(future_init, cfg.future_duration_s, phys,
                                  RecordKind::target_future);
    if (!has_interaction(future)) continue;
    return {init, std::move(target), std::move(future)};
  }
  throw GenError("target resampling exhausted: no interaction within " +
                 std::to_string(cfg.max_resample_attempts) + " attempts");
}

ReferenceSample sample_reference_set(const std::vector<ObjectSpec>& roster,
                                     const GenConfig& cfg,
                                     const PhysicsConfig& phys,
                                     RngStream& rng) {
  cfg.validate();
  const int n = static_cast<int>(roster.size());
  const auto charged = charged_ids(roster);
  const auto heavy = heavy_id(roster);

  auto spec_of = [&](int id) -> const ObjectSpec& {
    for (const auto& o : roster) {
      if (o.id == id) return o;
    }
    throw GenError("unknown roster id " + std::to_string(id));
  };
  auto random_id = [&]() {
    return roster[static_cast<std::size_t>(rng.uniform_int(0, n - 1))].id;
  };

  // cast plan: ref 0 hosts the charged pair, ref 1 a heavy collision,
  // remaining slots mop up uncovered objects
  std::array<std::vector<int>, 4> casts;
  if (charged.size() == 2) {
    casts[0] = {charged[0], charged[1]};
  }
  if (heavy) {
    int partner = random_id();
    while (partner == *heavy) partner = random_id();
    casts[1] = {*heavy, partner};
  }
  std::set<int> covered;
  for (const auto& cast : casts) covered.insert(cast.begin(), cast.end());
  std::vector<int> uncovered;
  for (const auto& o : roster) {
    if (!covered.count(o.id)) uncovered.push_back(o.id);
  }
  rng.shuffle(uncovered);
  for (int id : uncovered) {
    // favour the emptiest cast with room
    int best = -1;
    for (int r = 0; r < 4; ++r) {
      if (static_cast<int>(casts[static_cast<std::size_t>(r)].size()) >=
          cfg.n_ref_objects_max) {
        continue;
      }
      if (best < 0 || casts[static_cast<std::size_t>(r)].size() <
                          casts[static_cast<std::size_t>(best)].size()) {
        best = r;
      }
    }
    if (best < 0) throw GenError("reference casts cannot cover the roster");
    casts[static_cast<std::size_t>(best)].push_back(id);
  }
  for (auto& cast : casts) {
    while (static_cast<int>(cast.size()) < cfg.n_ref_objects_min) {
      int id = random_id();
      while (std::find(cast.begin(), cast.end(), id) != cast.end()) {
        id = random_id();
      }
      cast.push_back(id);
    }
  }

  ReferenceSample out;
  for (int r = 0; r < 4; ++r) {
    const auto& cast_ids = casts[static_cast<std::size_t>(r)];
    std::vector<ObjectSpec> cast;
    for (int id : cast_ids) cast.push_back(spec_of(id));

    const bool charge_ref = r == 0 && charged.size() == 2;
    const bool heavy_ref = r == 1 && heavy.has_value();
    bool done = false;
    for (int attempt = 0; attempt < cfg.max_resample_attempts && !done;
         ++attempt) {
      auto states = place_cast(cast, cfg, phys, rng);
      if (!states) continue;
      // charged protagonists only need proximity; colliders need an aimed shot
      aim_protagonists(*states, cfg, rng, /*co_locate_only=*/charge_ref);
      if (!inside_arena(*states, phys) || overlaps(*states, cfg.clearance)) {
        continue;
      }
      InitialConditions init{cast, *states};
      SceneRecord rec =
          simulate(init, cfg.ref_duration_s, phys, RecordKind::reference);
      if (!has_interaction(rec)) continue;
      if (charge_ref && !has_charge_event_between(rec, charged[0], charged[1])) {
        continue;
      }
      if (heavy_ref && !has_collision_with(rec, *heavy)) continue;
      out.inits[static_cast<std::size_t>(r)] = std::move(init);
      out.records[static_cast<std::size_t>(r)] = std::move(rec);
      done = true;
    }
    if (!done) {
      throw GenError("reference " + std::to_string(r) +
                     " resampling exhausted (constraint: " +
                     (charge_ref ? "charged interaction"
                                 : heavy_ref ? "heavy collision"
                                             : "any interaction") +
                     ")");
    }
  }
  return out;
}

VideoSet generate_video_set(const GenConfig& cfg, const PhysicsConfig& phys,
                            std::uint64_t set_index) {
  RngStream rng(RngStream::derive(cfg.seed, set_index));
  VideoSet set;
  set.roster = sample_roster(cfg, rng);
  auto target = sample_target(set.roster, cfg, phys, rng);
  set.target = std::move(target.target);
  set.future = std::move(target.future);
  auto refs = sample_reference_set(set.roster, cfg, phys, rng);
  set.references = std::move(refs.records);
  const auto violations = validate_video_set(set);
  if (!violations.empty()) {
    throw GenError("generated set violates invariants: " + violations.front());
  }
  return set;
}

bool pair_has_interaction(const VideoSet& set, int a, int b) {
  auto in_record = [&](const SceneRecord& rec) {
    return std::any_of(rec.events.begin(), rec.events.end(),
                       [&](const EventRecord& e) {
                         return e.is_interaction() && e.involves(a) &&
                                e.involves(b);
                       });
  };
  if (in_record(set.target)) return true;
  for (const auto& ref : set.references) {
    if (in_record(ref)) return true;
  }
  return false;
}

bool check_informativeness(const VideoSet& set,
                           const std::vector<Question>& questions) {
  static const std::set<std::string> compare_ops = {
      "is_heavier", "is_lighter", "is_same_charged", "is_opposite_charged"};
  World world;
  world.target = &set.target;
  world.future = &set.future;
  world.props = PropertiesView::from_roster(set.roster);

  for (const auto& q : questions) {
    if (q.qtype != QuestionType::factual) continue;
    Program p = parse_program(q.program);
    const ProgNode& root = p.nodes.back();
    if (!compare_ops.count(root.op)) continue;
    std::vector<Value> slots;
    try {
      slots = execute_all(p, world);
    } catch (const ExecError&) {
      return false;  // a comparison that cannot resolve is uninformative
    }
    const int a =
        std::get<ObjectVal>(slots[static_cast<std::size_t>(root.inputs[0])]).id;
    const int b =
        std::get<ObjectVal>(slots[static_cast<std::size_t>(root.inputs[1])]).id;
    if (!pair_has_interaction(set, a, b)) return false;
  }
  return true;
}

}  // namespace physq
