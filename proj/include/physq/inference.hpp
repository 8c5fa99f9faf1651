#pragma once

#include <string>
#include <vector>

#include "physq/physics.hpp"
#include "physq/types.hpp"

namespace physq {

// One candidate assignment of hidden properties, aligned with roster order.
// Canonical under charge inversion and restricted to the set rules (at most
// one charged pair, at most one heavy object).
struct Hypothesis {
  std::vector<MassLevel> mass;
  std::vector<ChargeSign> charge;

  int n_heavy() const;
  int n_charged() const;
  std::string signature() const;  // compact text form, e.g. "L H L | 0 + -"
  bool operator==(const Hypothesis&) const = default;
};

std::vector<Hypothesis> enumerate_hypotheses(int n_objects);

struct FitScore {
  Hypothesis hypothesis;
  std::vector<double> per_video;  // mean squared position error per reference
  double total = 0.0;
};

struct EnumerationResult {
  PropertyGraph graph;            // argmin labels, softmin confidences
  Hypothesis best;
  bool ambiguous = false;         // tie spans differing labels
  std::vector<FitScore> ranking;  // ascending total, then fewest properties
  std::size_t tied_count = 1;     // leading entries within tolerance
};

// Event-signature rules on one record: attraction => opposite edge,
// repulsion => same edge, collision deflection ratio => relative mass (the
// body with the smaller velocity change is the heavier one).
PropertyGraph infer_from_events_single(const SceneRecord& record,
                                       const std::vector<ObjectSpec>& roster);

// All records pooled: per-video partial graphs fused by confidence.
PropertyGraph infer_from_events(const std::vector<const SceneRecord*>& records,
                                const std::vector<ObjectSpec>& roster);

// Exhaustive simulation matching: re-simulates every reference from its
// first recorded frame under each hypothesis and ranks by total discrepancy.
// Reads trajectories only, never the roster's hidden annotation.
EnumerationResult infer_by_enumeration(const VideoSet& set,
                                       const PhysicsConfig& cfg);

// Max-confidence fusion of per-video partial graphs, aligned by the objects'
// unique attribute triples. Conflicts resolve toward the higher confidence
// and are reported through `warnings`.
PropertyGraph fuse_subgraphs(const std::vector<PropertyGraph>& partials,
                             const std::vector<ObjectSpec>& roster,
                             std::vector<std::string>* warnings = nullptr);

// Fills unlabeled nodes/edges with the priors (light / none) at confidence 0.5.
PropertyGraph complete_graph(PropertyGraph g,
                             const std::vector<ObjectSpec>& roster);

// Ground-truth graph from an annotated roster (for scoring).
PropertyGraph truth_graph(const std::vector<ObjectSpec>& roster);

}  // namespace physq
