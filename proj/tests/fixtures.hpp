#pragma once

#include <vector>

#include "physq/physics.hpp"
#include "physq/types.hpp"

namespace physq::testing {

inline ObjectSpec make_object(int id, Color c, Shape sh, Material m,
                              MassLevel mass = MassLevel::light,
                              ChargeSign charge = ChargeSign::neutral) {
  ObjectSpec o;
  o.id = id;
  o.color = c;
  o.shape = sh;
  o.material = m;
  o.mass = mass;
  o.charge = charge;
  return o;
}

inline BodyState body(double x, double y, double vx, double vy,
                      double radius = 0.3) {
  BodyState s;
  s.position = {x, y};
  s.velocity = {vx, vy};
  s.radius = radius;
  return s;
}

// Three objects: 0 and 1 are the +/- pair, 2 is heavy. Hand-placed initial
// conditions give a collision in the target and an interaction per reference.
inline VideoSet make_valid_set(const PhysicsConfig& phys = {}) {
  std::vector<ObjectSpec> roster = {
      make_object(0, Color::red, Shape::sphere, Material::metal,
                  MassLevel::light, ChargeSign::positive),
      make_object(1, Color::blue, Shape::sphere, Material::rubber,
                  MassLevel::light, ChargeSign::negative),
      make_object(2, Color::green, Shape::cube, Material::metal,
                  MassLevel::heavy, ChargeSign::neutral),
  };
  auto pick = [&](std::initializer_list<int> ids) {
    std::vector<ObjectSpec> cast;
    for (int id : ids) cast.push_back(roster[static_cast<std::size_t>(id)]);
    return cast;
  };

  VideoSet set;
  set.roster = roster;

  InitialConditions target_init{
      pick({0, 1, 2}),
      {body(-1.5, 0.0, 1.0, 0.0), body(1.5, 0.0, -1.0, 0.0),
       body(0.0, 3.0, 0.0, -0.2, 0.35)}};
  set.target = simulate(target_init, 5.0, phys, RecordKind::target);
  set.future = simulate({target_init.objects, set.target.frames.back()}, 2.0,
                        phys, RecordKind::target_future);

  InitialConditions ref0{
      pick({0, 1}), {body(-1.0, 0.0, 0.3, 0.4), body(1.0, 0.0, -0.3, 0.4)}};
  InitialConditions ref1{
      pick({2, 0}), {body(-1.0, 0.5, 1.0, 0.0, 0.35), body(1.0, 0.5, -1.0, 0.0)}};
  InitialConditions ref2{
      pick({1, 2}), {body(-1.0, -0.5, 1.0, 0.0), body(1.0, -0.5, -1.0, 0.0, 0.35)}};
  InitialConditions ref3{
      pick({0, 1}), {body(-1.0, 1.0, 1.0, 0.0), body(1.0, 1.0, -1.0, 0.0)}};
  set.references[0] = simulate(ref0, 2.0, phys, RecordKind::reference);
  set.references[1] = simulate(ref1, 2.0, phys, RecordKind::reference);
  set.references[2] = simulate(ref2, 2.0, phys, RecordKind::reference);
  set.references[3] = simulate(ref3, 2.0, phys, RecordKind::reference);
  return set;
}

}  // namespace physq::testing
