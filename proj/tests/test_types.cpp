#include <doctest.h>

#include "fixtures.hpp"
#include "physq/json_io.hpp"
#include "physq/rng.hpp"
#include "physq/types.hpp"

using namespace physq;
using namespace physq::testing;

TEST_CASE("canonicalize_charges flips so the lowest charged id is positive") {
  std::map<int, ChargeSign> a = {{0, ChargeSign::negative},
                                 {3, ChargeSign::positive}};
  auto c = canonicalize_charges(a);
  CHECK(c[0] == ChargeSign::positive);
  CHECK(c[3] == ChargeSign::negative);

  std::map<int, ChargeSign> b = {{1, ChargeSign::positive},
                                 {2, ChargeSign::negative}};
  CHECK(canonicalize_charges(b) == b);

  std::map<int, ChargeSign> n = {{0, ChargeSign::neutral},
                                 {1, ChargeSign::neutral}};
  CHECK(canonicalize_charges(n) == n);
}

TEST_CASE("canonicalize_charges is idempotent and inversion-invariant") {
  RngStream rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    std::map<int, ChargeSign> a;
    const int n = rng.uniform_int(2, 6);
    for (int i = 0; i < n; ++i) {
      const int roll = rng.uniform_int(0, 2);
      a[i] = roll == 0 ? ChargeSign::neutral
             : roll == 1 ? ChargeSign::positive
                         : ChargeSign::negative;
    }
    std::map<int, ChargeSign> flipped;
    for (auto [id, c] : a) {
      flipped[id] = c == ChargeSign::positive   ? ChargeSign::negative
                    : c == ChargeSign::negative ? ChargeSign::positive
                                                : ChargeSign::neutral;
    }
    const auto ca = canonicalize_charges(a);
    CHECK(canonicalize_charges(ca) == ca);
    CHECK(canonicalize_charges(flipped) == ca);
  }
}

TEST_CASE("charge edge realizability") {
  PropertyGraph g;
  g.edge_charge[{0, 1}] = {ChargeRel::same, 1.0};
  CHECK(charge_edges_realizable(g));

  // same+same+opposite triangle has no signed assignment
  g.edge_charge[{1, 2}] = {ChargeRel::same, 1.0};
  g.edge_charge[{0, 2}] = {ChargeRel::opposite, 1.0};
  CHECK_FALSE(charge_edges_realizable(g));

  PropertyGraph h;
  h.edge_charge[{0, 1}] = {ChargeRel::opposite, 1.0};
  h.edge_charge[{1, 2}] = {ChargeRel::opposite, 1.0};
  h.edge_charge[{0, 2}] = {ChargeRel::same, 1.0};
  CHECK(charge_edges_realizable(h));

  // a none edge between two charged endpoints is contradictory
  h.edge_charge[{0, 2}] = {ChargeRel::none, 1.0};
  CHECK_FALSE(charge_edges_realizable(h));
}

TEST_CASE("realize_signs produces the canonical assignment") {
  PropertyGraph g;
  g.edge_charge[{1, 3}] = {ChargeRel::opposite, 1.0};
  auto signs = realize_signs(g, {0, 1, 2, 3});
  CHECK(signs[0] == ChargeSign::neutral);
  CHECK(signs[1] == ChargeSign::positive);
  CHECK(signs[2] == ChargeSign::neutral);
  CHECK(signs[3] == ChargeSign::negative);
}

TEST_CASE("validate_video_set accepts the hand-built set") {
  const VideoSet set = make_valid_set();
  CHECK(validate_video_set(set).empty());
}

TEST_CASE("validate_video_set flags three charged objects") {
  VideoSet set = make_valid_set();
  set.roster[2].charge = ChargeSign::positive;
  const auto violations = validate_video_set(set);
  REQUIRE_FALSE(violations.empty());
  bool found = false;
  for (const auto& v : violations) {
    if (v.find("charge-pair violation: 3 charged") != std::string::npos) {
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("validate_video_set flags a reference without interactions") {
  VideoSet set = make_valid_set();
  // straight-line pass with no contact and no charge: detect_events comes
  // back interaction-free
  PhysicsConfig phys;
  InitialConditions quiet{
      {make_object(0, Color::red, Shape::sphere, Material::metal,
                   MassLevel::light, ChargeSign::neutral),
       make_object(2, Color::green, Shape::cube, Material::metal,
                   MassLevel::heavy, ChargeSign::neutral)},
      {body(-2.0, -2.0, 1.0, 0.0), body(-2.0, 2.0, 1.0, 0.0, 0.35)}};
  SceneRecord rec = simulate(quiet, 2.0, phys, RecordKind::reference);
  bool any_interaction = false;
  for (const auto& e : rec.events) {
    if (e.is_interaction()) any_interaction = true;
  }
  REQUIRE_FALSE(any_interaction);

  set.references[2] = rec;
  const auto violations = validate_video_set(set);
  bool found = false;
  for (const auto& v : violations) {
    if (v.find("reference 2 lacks interaction") != std::string::npos) {
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("validate_video_set flags missing reference coverage") {
  VideoSet set = make_valid_set();
  for (auto& ref : set.references) {
    if (ref.has_object(2)) {
      // drop object 2 from the cast entirely
      const int idx = ref.index_of(2);
      ref.objects.erase(ref.objects.begin() + idx);
      for (auto& frame : ref.frames) frame.erase(frame.begin() + idx);
      std::vector<EventRecord> kept;
      for (const auto& e : ref.events) {
        if (!e.involves(2)) kept.push_back(e);
      }
      ref.events = kept;
      ref.contacts.clear();
      ref.wall_contacts.clear();
    }
  }
  const auto violations = validate_video_set(set);
  bool found = false;
  for (const auto& v : violations) {
    if (v.find("appears in no reference") != std::string::npos) found = true;
  }
  CHECK(found);
}

TEST_CASE("video set JSON round-trips field for field") {
  const VideoSet set = make_valid_set();
  json j = set;
  const auto decoded = j.get<VideoSet>();
  CHECK(decoded == set);
  // byte-identical re-serialization
  CHECK(json(decoded).dump() == j.dump());
}

TEST_CASE("property graph JSON round-trip") {
  PropertyGraph g;
  g.node_mass[0] = {MassLevel::heavy, 0.9};
  g.node_mass[1] = {MassLevel::light, 1.0};
  g.edge_charge[{0, 1}] = {ChargeRel::opposite, 0.8};
  json j = g;
  CHECK(j.get<PropertyGraph>() == g);
}
