#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "physq/types.hpp"

namespace physq {

struct SimError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PhysicsConfig {
  double k_coulomb = 8.0;
  double dt_substep = 0.002;
  int record_fps = 25;
  double restitution = 1.0;
  double arena_half_extent = 5.0;
  double linear_drag = 0.0;          // per second
  double interaction_range = 3.0;    // attraction/repulsion logging distance
  double collision_eps = 1e-9;
  bool open_boundary = false;        // open walls enable "out" events

  // substeps between recorded frames; throws unless dt*fps divides 1
  int substeps_per_frame() const;
  void validate() const;
};

struct InitialConditions {
  std::vector<ObjectSpec> objects;
  std::vector<BodyState> states;
};

struct SimStats {
  int pair_contacts = 0;
  int wall_bounces = 0;
};

// Force ON a exerted by b: k*q_a*q_b / max(r, r_a+r_b)^2 along the b->a axis,
// so same signs repel. Force on b is the exact negation.
Vec2 coulomb_force(const BodyState& a, const BodyState& b, double q_a,
                   double q_b, const PhysicsConfig& cfg);

// Impulse along the center line with the configured restitution, tangential
// components untouched; residual overlap removed weighted by inverse mass.
// Separating pairs come back unchanged. Identical centers resolve along +x.
std::pair<BodyState, BodyState> resolve_collision(BodyState a, BodyState b,
                                                  double mass_a, double mass_b,
                                                  const PhysicsConfig& cfg);

// Sub-frame log produced by one step() call; times are fractions of dt.
struct StepLog {
  std::vector<std::pair<double, std::pair<int, int>>> contacts;  // (t, (i,j))
  std::vector<std::pair<double, int>> wall_hits;                 // (t, i)
};

// One semi-implicit Euler substep: v += (F/m - drag*v)*dt, then positions
// advance with contacts resolved at their exact time of impact inside the
// substep (keeps restitution-1 contacts energy-clean). Closed arenas reflect
// elastically at the walls.
void step(std::vector<BodyState>& states, const std::vector<ObjectSpec>& objects,
          const PhysicsConfig& cfg, StepLog* log = nullptr);

// Runs the substep loop, records round(duration*fps) frames at times k/fps
// (frame 0 is the initial state), then detects events. Pure function of its
// inputs.
SceneRecord simulate(const InitialConditions& init, double duration_s,
                     const PhysicsConfig& cfg,
                     RecordKind kind = RecordKind::target,
                     SimStats* stats = nullptr);

// Frames-only variant used by hypothesis scoring; skips event annotation.
SceneRecord simulate_frames(const InitialConditions& init, double duration_s,
                            const PhysicsConfig& cfg,
                            RecordKind kind = RecordKind::target);

// Event annotation from a recorded scene: collisions from the contact log
// (first frame of each contact episode), attraction/repulsion as intervals
// while a charged pair sits within interaction_range, "in" at frame 0, "out"
// when a center leaves an open arena.
std::vector<EventRecord> detect_events(const SceneRecord& record,
                                       const std::vector<ObjectSpec>& objects,
                                       const PhysicsConfig& cfg);

// Proximity-based event detection for trajectories that carry no contact log
// (learned rollouts): collisions where discs overlap at a recorded frame,
// intervals from a supplied relative-charge labeling.
std::vector<EventRecord> detect_events_kinematic(
    const SceneRecord& record,
    const std::map<std::pair<int, int>, ChargeRel>& relations,
    const PhysicsConfig& cfg);

double kinetic_energy(const std::vector<BodyState>& states,
                      const std::vector<ObjectSpec>& objects);
double coulomb_potential(const std::vector<BodyState>& states,
                         const std::vector<ObjectSpec>& objects,
                         const PhysicsConfig& cfg);
Vec2 total_momentum(const std::vector<BodyState>& states,
                    const std::vector<ObjectSpec>& objects);

}  // namespace physq
