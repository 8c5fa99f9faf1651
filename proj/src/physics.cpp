#include "physq/physics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace physq {

int PhysicsConfig::substeps_per_frame() const {
  const double exact = 1.0 / (dt_substep * record_fps);
  const int n = static_cast<int>(std::lround(exact));
  if (n < 1 || std::abs(exact - n) > 1e-9) {
    throw SimError("dt_substep * record_fps must divide 1 second evenly");
  }
  return n;
}

void PhysicsConfig::validate() const {
  if (!(k_coulomb >= 0) || !std::isfinite(k_coulomb) ||
      !(dt_substep > 0) || record_fps < 1 || restitution < 0 ||
      restitution > 1 || !(arena_half_extent > 0) || linear_drag < 0 ||
      !(interaction_range > 0) || !(collision_eps >= 0)) {
    throw SimError("physics config out of range");
  }
  (void)substeps_per_frame();
}

Vec2 coulomb_force(const BodyState& a, const BodyState& b, double q_a,
                   double q_b, const PhysicsConfig& cfg) {
  const double qq = q_a * q_b;
  if (qq == 0.0) return {};
  Vec2 axis = a.position - b.position;
  double r = axis.norm();
  if (r == 0.0) {
    axis = {1.0, 0.0};
    r = 1.0;
  } else {
    axis = axis / r;
  }
  const double r_clamp = a.radius + b.radius;
  const double r_eff = std::max(r, r_clamp);
  const double magnitude = cfg.k_coulomb * qq / (r_eff * r_eff);
  return axis * magnitude;  // positive qq pushes a away from b
}

namespace {

// Shared impulse math; states must already be in (near) contact.
void apply_contact_impulse(BodyState& a, BodyState& b, double mass_a,
                           double mass_b, double restitution) {
  Vec2 n = b.position - a.position;
  const double d = n.norm();
  n = d > 0.0 ? n / d : Vec2{1.0, 0.0};
  const double vn = (b.velocity - a.velocity).dot(n);
  if (vn >= 0.0) return;  // not approaching
  const double j = -(1.0 + restitution) * vn / (1.0 / mass_a + 1.0 / mass_b);
  a.velocity -= n * (j / mass_a);
  b.velocity += n * (j / mass_b);
}

void depenetrate(BodyState& a, BodyState& b, double mass_a, double mass_b,
                 double eps) {
  Vec2 n = b.position - a.position;
  const double d = n.norm();
  const double target = a.radius + b.radius;
  if (d >= target - eps) return;
  n = d > 0.0 ? n / d : Vec2{1.0, 0.0};
  const double overlap = target - d;
  const double inv_a = 1.0 / mass_a;
  const double inv_b = 1.0 / mass_b;
  const double total = inv_a + inv_b;
  a.position -= n * (overlap * inv_a / total);
  b.position += n * (overlap * inv_b / total);
}

// Earliest t in [0, horizon] at which the moving discs touch, or negative.
double pair_toi(const BodyState& a, const BodyState& b, double horizon,
                double eps) {
  const Vec2 dx = b.position - a.position;
  const Vec2 dv = b.velocity - a.velocity;
  const double radius_sum = a.radius + b.radius;
  const double c = dx.norm_sq() - radius_sum * radius_sum;
  const double bq = 2.0 * dx.dot(dv);
  if (c <= eps) {
    return bq < 0.0 ? 0.0 : -1.0;  // already touching; act only if approaching
  }
  const double aq = dv.norm_sq();
  if (aq == 0.0 || bq >= 0.0) return -1.0;
  const double disc = bq * bq - 4.0 * aq * c;
  if (disc < 0.0) return -1.0;
  const double t = (-bq - std::sqrt(disc)) / (2.0 * aq);
  return (t >= 0.0 && t <= horizon) ? t : -1.0;
}

// Earliest wall hit for one object in a closed arena, or negative.
// Returns time and axis (0 = x, 1 = y) through out parameters.
double wall_toi(const BodyState& s, double half_extent, double horizon,
                int& axis) {
  double best = -1.0;
  const double bx = half_extent - s.radius;
  const double comps[2][2] = {{s.position.x, s.velocity.x},
                              {s.position.y, s.velocity.y}};
  for (int ax = 0; ax < 2; ++ax) {
    const double p = comps[ax][0];
    const double v = comps[ax][1];
    double t = -1.0;
    if (v > 0.0) {
      t = p >= bx ? 0.0 : (bx - p) / v;
    } else if (v < 0.0) {
      t = p <= -bx ? 0.0 : (-bx - p) / v;
    }
    if (t >= 0.0 && t <= horizon && (best < 0.0 || t < best)) {
      best = t;
      axis = ax;
    }
  }
  return best;
}

}  // namespace

std::pair<BodyState, BodyState> resolve_collision(BodyState a, BodyState b,
                                                  double mass_a, double mass_b,
                                                  const PhysicsConfig& cfg) {
  const double d = (b.position - a.position).norm();
  if (d > a.radius + b.radius + cfg.collision_eps) {
    return {a, b};  // not in contact
  }
  apply_contact_impulse(a, b, mass_a, mass_b, cfg.restitution);
  depenetrate(a, b, mass_a, mass_b, cfg.collision_eps);
  return {a, b};
}

namespace {

void half_kick(std::vector<BodyState>& states,
               const std::vector<ObjectSpec>& objects,
               const PhysicsConfig& cfg, double half_dt) {
  const std::size_t n = states.size();
  std::vector<Vec2> force(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double qi = charge_value(objects[i].charge);
    if (qi == 0.0) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double qj = charge_value(objects[j].charge);
      if (qj == 0.0) continue;
      const Vec2 f = coulomb_force(states[i], states[j], qi, qj, cfg);
      force[i] += f;
      force[j] -= f;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double m = mass_value(objects[i].mass);
    states[i].velocity +=
        (force[i] / m - states[i].velocity * cfg.linear_drag) * half_dt;
  }
}

// One kick-drift-kick slice of length dt. Contacts resolve at their exact
// time of impact inside the drift, where velocities are constant, so
// restitution-1 contacts stay energy-clean; the symmetric splitting keeps
// the energy oscillation quadratic in dt across reflections.
void step_slice(std::vector<BodyState>& states,
                const std::vector<ObjectSpec>& objects,
                const PhysicsConfig& cfg, double dt, double t_offset,
                StepLog* log) {
  const std::size_t n = states.size();

  half_kick(states, objects, cfg, dt / 2);

  // drift, event-driven within the substep
  double remaining = dt;
  const int max_events = 64;
  int events = 0;
  while (remaining > 0.0 && events < max_events) {
    double t_hit = -1.0;
    int hit_i = -1, hit_j = -1;  // hit_j < 0 means wall, axis in hit_axis
    int hit_axis = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double t =
            pair_toi(states[i], states[j], remaining, cfg.collision_eps);
        if (t >= 0.0 && (t_hit < 0.0 || t < t_hit)) {
          t_hit = t;
          hit_i = static_cast<int>(i);
          hit_j = static_cast<int>(j);
        }
      }
    }
    if (!cfg.open_boundary) {
      for (std::size_t i = 0; i < n; ++i) {
        int axis = 0;
        const double t =
            wall_toi(states[i], cfg.arena_half_extent, remaining, axis);
        if (t >= 0.0 && (t_hit < 0.0 || t < t_hit)) {
          t_hit = t;
          hit_i = static_cast<int>(i);
          hit_j = -1;
          hit_axis = axis;
        }
      }
    }
    if (t_hit < 0.0) break;

    for (auto& s : states) s.position += s.velocity * t_hit;
    remaining -= t_hit;
    const double when = t_offset + (dt - remaining);
    if (hit_j >= 0) {
      apply_contact_impulse(states[static_cast<std::size_t>(hit_i)],
                            states[static_cast<std::size_t>(hit_j)],
                            mass_value(objects[static_cast<std::size_t>(hit_i)].mass),
                            mass_value(objects[static_cast<std::size_t>(hit_j)].mass),
                            cfg.restitution);
      if (log) log->contacts.push_back({when, {hit_i, hit_j}});
    } else {
      auto& s = states[static_cast<std::size_t>(hit_i)];
      if (hit_axis == 0) {
        s.velocity.x = -s.velocity.x;
      } else {
        s.velocity.y = -s.velocity.y;
      }
      if (log) log->wall_hits.push_back({when, hit_i});
    }
    ++events;
  }
  for (auto& s : states) s.position += s.velocity * remaining;

  // safety net: separate any residual overlap (e.g. event cap exhausted)
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      depenetrate(states[i], states[j], mass_value(objects[i].mass),
                  mass_value(objects[j].mass), cfg.collision_eps);
    }
  }

  half_kick(states, objects, cfg, dt / 2);

  for (std::size_t i = 0; i < n; ++i) {
    if (!states[i].finite()) {
      throw SimError("non-finite state for object id " +
                     std::to_string(objects[i].id));
    }
  }
}

// A contact mid-drift makes the potential sampled by the two kicks straddle
// the bounce asymmetrically, leaking O(dt * v * F) of energy per bounce. Any
// substep about to contain a contact while a body is under real force runs
// on a 512x finer grid; away from contacts the grid never changes, so the
// integrator's smooth-phase cancellation stays intact.
bool contact_imminent(const std::vector<BodyState>& states,
                      const std::vector<ObjectSpec>& objects,
                      const PhysicsConfig& cfg, double dt) {
  const std::size_t n = states.size();
  double max_force = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double qi = charge_value(objects[i].charge);
    if (qi == 0.0) continue;
    Vec2 f;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double qj = charge_value(objects[j].charge);
      if (qj == 0.0) continue;
      f += coulomb_force(states[i], states[j], qi, qj, cfg);
    }
    max_force = std::max(max_force, f.norm());
  }
  if (max_force < 0.1) return false;

  const double horizon = 2.0 * dt;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (pair_toi(states[i], states[j], horizon, cfg.collision_eps) >= 0.0) {
        return true;
      }
    }
    if (!cfg.open_boundary) {
      int axis = 0;
      if (wall_toi(states[i], cfg.arena_half_extent, horizon, axis) >= 0.0) {
        return true;
      }
    }
  }
  return false;
}

}  // namespace

void step(std::vector<BodyState>& states, const std::vector<ObjectSpec>& objects,
          const PhysicsConfig& cfg, StepLog* log) {
  const int slices =
      contact_imminent(states, objects, cfg, cfg.dt_substep) ? 512 : 1;
  const double h = cfg.dt_substep / slices;
  for (int s = 0; s < slices; ++s) {
    step_slice(states, objects, cfg, h, s * h, log);
  }
}

namespace {

SceneRecord run_simulation(const InitialConditions& init, double duration_s,
                           const PhysicsConfig& cfg, RecordKind kind,
                           SimStats* stats, bool detect) {
  cfg.validate();
  if (init.objects.size() != init.states.size()) {
    throw SimError("initial conditions size mismatch");
  }
  SceneRecord rec;
  rec.objects = init.objects;
  rec.duration_s = duration_s;
  rec.fps = cfg.record_fps;
  rec.kind = kind;

  const int n_frames =
      static_cast<int>(std::lround(duration_s * cfg.record_fps));
  if (n_frames < 1) throw SimError("duration too short to record a frame");
  const int spf = cfg.substeps_per_frame();

  std::vector<BodyState> states = init.states;
  rec.frames.reserve(static_cast<std::size_t>(n_frames));
  rec.frames.push_back(states);
  for (int f = 1; f < n_frames; ++f) {
    for (int s = 0; s < spf; ++s) {
      StepLog log;
      try {
        step(states, rec.objects, cfg, &log);
      } catch (const SimError& e) {
        throw SimError(std::string(e.what()) + " at frame " +
                       std::to_string(f));
      }
      // contacts get stamped with the frame interval they fall into
      const int stamp = f - 1;
      for (const auto& [t, pair] : log.contacts) {
        (void)t;
        rec.contacts.push_back({stamp, rec.objects[static_cast<std::size_t>(pair.first)].id,
                                rec.objects[static_cast<std::size_t>(pair.second)].id});
        if (stats) ++stats->pair_contacts;
      }
      for (const auto& [t, idx] : log.wall_hits) {
        (void)t;
        rec.wall_contacts.push_back(
            {stamp, rec.objects[static_cast<std::size_t>(idx)].id});
        if (stats) ++stats->wall_bounces;
      }
    }
    rec.frames.push_back(states);
  }
  if (detect) {
    rec.events = detect_events(rec, rec.objects, cfg);
  }
  return rec;
}

}  // namespace

SceneRecord simulate(const InitialConditions& init, double duration_s,
                     const PhysicsConfig& cfg, RecordKind kind,
                     SimStats* stats) {
  return run_simulation(init, duration_s, cfg, kind, stats, true);
}

SceneRecord simulate_frames(const InitialConditions& init, double duration_s,
                            const PhysicsConfig& cfg, RecordKind kind) {
  return run_simulation(init, duration_s, cfg, kind, nullptr, false);
}

std::vector<EventRecord> detect_events(const SceneRecord& record,
                                       const std::vector<ObjectSpec>& objects,
                                       const PhysicsConfig& cfg) {
  std::vector<EventRecord> out;
  const int n_frames = record.frame_count();

  // "in" at frame 0 for everything present from the start
  for (const auto& o : record.objects) {
    out.push_back({EventKind::enter, {o.id}, 0, 0});
  }

  // collisions: merge the contact log into episodes per pair
  std::map<std::pair<int, int>, std::vector<int>> by_pair;
  for (const auto& c : record.contacts) {
    by_pair[ordered_pair(c.a, c.b)].push_back(c.frame);
  }
  for (auto& [key, frames] : by_pair) {
    std::sort(frames.begin(), frames.end());
    int episode_start = frames.front();
    int prev = frames.front();
    auto emit = [&](int start) {
      out.push_back({EventKind::collision, {key.first, key.second}, start, start});
    };
    for (std::size_t i = 1; i < frames.size(); ++i) {
      if (frames[i] > prev + 1) {
        emit(episode_start);
        episode_start = frames[i];
      }
      prev = frames[i];
    }
    emit(episode_start);
  }

  // attraction/repulsion intervals for charged pairs within range
  auto charge_of = [&](int id) {
    for (const auto& o : objects) {
      if (o.id == id) return charge_value(o.charge);
    }
    return 0.0;
  };
  for (std::size_t i = 0; i < record.objects.size(); ++i) {
    for (std::size_t j = i + 1; j < record.objects.size(); ++j) {
      const double qq = charge_of(record.objects[i].id) *
                        charge_of(record.objects[j].id);
      if (qq == 0.0) continue;
      const EventKind kind =
          qq < 0.0 ? EventKind::attraction : EventKind::repulsion;
      int start = -1;
      for (int f = 0; f < n_frames; ++f) {
        const double d =
            (record.frames[static_cast<std::size_t>(f)][i].position -
             record.frames[static_cast<std::size_t>(f)][j].position)
                .norm();
        const bool in_range = d <= cfg.interaction_range;
        if (in_range && start < 0) start = f;
        if ((!in_range || f == n_frames - 1) && start >= 0) {
          const int end = in_range ? f : f - 1;
          out.push_back({kind,
                         {record.objects[i].id, record.objects[j].id},
                         start,
                         end});
          start = -1;
        }
      }
    }
  }

  // "out" the first time a center leaves an open arena
  if (cfg.open_boundary) {
    for (std::size_t i = 0; i < record.objects.size(); ++i) {
      for (int f = 0; f < n_frames; ++f) {
        const Vec2 p = record.frames[static_cast<std::size_t>(f)][i].position;
        if (std::abs(p.x) > cfg.arena_half_extent ||
            std::abs(p.y) > cfg.arena_half_extent) {
          out.push_back({EventKind::exit, {record.objects[i].id}, f, f});
          break;
        }
      }
    }
  }

  std::sort(out.begin(), out.end(), [](const EventRecord& a, const EventRecord& b) {
    return std::tie(a.frame, a.kind, a.participants, a.frame_end) <
           std::tie(b.frame, b.kind, b.participants, b.frame_end);
  });
  return out;
}

std::vector<EventRecord> detect_events_kinematic(
    const SceneRecord& record,
    const std::map<std::pair<int, int>, ChargeRel>& relations,
    const PhysicsConfig& cfg) {
  std::vector<EventRecord> out;
  const int n_frames = record.frame_count();
  for (const auto& o : record.objects) {
    out.push_back({EventKind::enter, {o.id}, 0, 0});
  }
  const double contact_slack = 1.05;
  for (std::size_t i = 0; i < record.objects.size(); ++i) {
    for (std::size_t j = i + 1; j < record.objects.size(); ++j) {
      const int a = record.objects[i].id;
      const int b = record.objects[j].id;
      const double touch =
          (record.frames[0][i].radius + record.frames[0][j].radius) *
          contact_slack;
      bool in_contact = false;
      for (int f = 0; f < n_frames; ++f) {
        const double d =
            (record.frames[static_cast<std::size_t>(f)][i].position -
             record.frames[static_cast<std::size_t>(f)][j].position)
                .norm();
        if (d <= touch && !in_contact) {
          out.push_back({EventKind::collision, {a, b}, f, f});
          in_contact = true;
        } else if (d > touch) {
          in_contact = false;
        }
      }
      auto rel_it = relations.find(ordered_pair(a, b));
      if (rel_it != relations.end() && rel_it->second != ChargeRel::none) {
        const EventKind kind = rel_it->second == ChargeRel::opposite
                                   ? EventKind::attraction
                                   : EventKind::repulsion;
        int start = -1;
        for (int f = 0; f < n_frames; ++f) {
          const double d =
              (record.frames[static_cast<std::size_t>(f)][i].position -
               record.frames[static_cast<std::size_t>(f)][j].position)
                  .norm();
          const bool in_range = d <= cfg.interaction_range;
          if (in_range && start < 0) start = f;
          if ((!in_range || f == n_frames - 1) && start >= 0) {
            out.push_back({kind, {a, b}, start, in_range ? f : f - 1});
            start = -1;
          }
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const EventRecord& a, const EventRecord& b) {
    return std::tie(a.frame, a.kind, a.participants, a.frame_end) <
           std::tie(b.frame, b.kind, b.participants, b.frame_end);
  });
  return out;
}

double kinetic_energy(const std::vector<BodyState>& states,
                      const std::vector<ObjectSpec>& objects) {
  double e = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    e += 0.5 * mass_value(objects[i].mass) * states[i].velocity.norm_sq();
  }
  return e;
}

double coulomb_potential(const std::vector<BodyState>& states,
                         const std::vector<ObjectSpec>& objects,
                         const PhysicsConfig& cfg) {
  double e = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = i + 1; j < states.size(); ++j) {
      const double qq = charge_value(objects[i].charge) *
                        charge_value(objects[j].charge);
      if (qq == 0.0) continue;
      const double r = std::max((states[i].position - states[j].position).norm(),
                                states[i].radius + states[j].radius);
      e += cfg.k_coulomb * qq / r;
    }
  }
  return e;
}

Vec2 total_momentum(const std::vector<BodyState>& states,
                    const std::vector<ObjectSpec>& objects) {
  Vec2 p;
  for (std::size_t i = 0; i < states.size(); ++i) {
    p += states[i].velocity * mass_value(objects[i].mass);
  }
  return p;
}

}  // namespace physq
