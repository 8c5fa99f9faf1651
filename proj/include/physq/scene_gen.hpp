#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "physq/physics.hpp"
#include "physq/rng.hpp"
#include "physq/types.hpp"

namespace physq {

struct GenError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GenConfig {
  std::uint64_t seed = 1;
  int n_objects_min = 3;
  int n_objects_max = 5;
  int n_ref_objects_min = 2;
  int n_ref_objects_max = 3;
  double target_duration_s = 5.0;
  double future_duration_s = 2.0;
  double ref_duration_s = 2.0;
  int max_resample_attempts = 200;
  bool complex_mode = false;  // 6-8 objects, heavy and charged pair both on

  double speed_min = 0.5;
  double speed_max = 2.5;
  double clearance = 0.2;  // minimum initial surface gap between discs

  void validate() const;
};

std::vector<ObjectSpec> sample_roster(const GenConfig& cfg, RngStream& rng);

struct TargetSample {
  InitialConditions init;
  SceneRecord target;
  SceneRecord future;
};

// Resamples starts until the target shows at least one collision or charged
// interaction; the future record continues from the target's final frame.
TargetSample sample_target(const std::vector<ObjectSpec>& roster,
                           const GenConfig& cfg, const PhysicsConfig& phys,
                           RngStream& rng);

struct ReferenceSample {
  std::array<InitialConditions, 4> inits;
  std::array<SceneRecord, 4> records;
};

// Casts of 2-3 objects covering the roster; every reference contains an
// interaction, the charged pair shows attraction/repulsion in at least one
// reference, and a heavy object collides in at least one.
ReferenceSample sample_reference_set(const std::vector<ObjectSpec>& roster,
                                     const GenConfig& cfg,
                                     const PhysicsConfig& phys, RngStream& rng);

VideoSet generate_video_set(const GenConfig& cfg, const PhysicsConfig& phys,
                            std::uint64_t set_index);

// True iff every mass-comparison / charge-relation question references a pair
// with at least one shared interaction event in the target or a reference.
bool check_informativeness(const VideoSet& set,
                           const std::vector<Question>& questions);

// Shared-interaction lookup used by the informativeness rule.
bool pair_has_interaction(const VideoSet& set, int a, int b);

}  // namespace physq
