#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "physq/physics.hpp"
#include "physq/rng.hpp"

using namespace physq;
using namespace physq::testing;

TEST_CASE("coulomb force follows k q q / r^2 with sign") {
  PhysicsConfig cfg;
  BodyState a = body(0.0, 0.0, 0.0, 0.0);
  BodyState b = body(2.0, 0.0, 0.0, 0.0);

  // like charges at r=2 with k=8: magnitude 8*1*1/4 = 2, pushing a away
  Vec2 f = coulomb_force(a, b, 1.0, 1.0, cfg);
  CHECK(f.x == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(f.y == doctest::Approx(0.0));

  // neutral object feels nothing
  CHECK(coulomb_force(a, b, 0.0, 1.0, cfg) == Vec2{});

  // opposite charges pull a toward b with the same magnitude
  f = coulomb_force(a, b, 1.0, -1.0, cfg);
  CHECK(f.x == doctest::Approx(2.0).epsilon(1e-12));

  // below the radius sum the force is clamped, no singularity
  BodyState close = body(0.1, 0.0, 0.0, 0.0);
  f = coulomb_force(a, close, 1.0, 1.0, cfg);
  const double clamp = a.radius + close.radius;
  CHECK(f.norm() == doctest::Approx(8.0 / (clamp * clamp)));
}

TEST_CASE("elastic collision closed forms") {
  PhysicsConfig cfg;

  SUBCASE("equal masses head-on swap velocities") {
    BodyState a = body(-0.3, 0.0, 1.0, 0.0);
    BodyState b = body(0.3, 0.0, -1.0, 0.0);
    auto [a2, b2] = resolve_collision(a, b, 1.0, 1.0, cfg);
    CHECK(a2.velocity.x == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(b2.velocity.x == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("5-vs-1 against a resting body gives (2/3, 5/3)") {
    BodyState a = body(-0.3, 0.0, 1.0, 0.0);
    BodyState b = body(0.3, 0.0, 0.0, 0.0);
    auto [a2, b2] = resolve_collision(a, b, 5.0, 1.0, cfg);
    CHECK(std::abs(a2.velocity.x - 2.0 / 3.0) < 1e-9);
    CHECK(std::abs(b2.velocity.x - 5.0 / 3.0) < 1e-9);
    CHECK(a2.velocity.y == 0.0);
  }

  SUBCASE("separating bodies stay untouched") {
    BodyState a = body(-0.3, 0.0, -1.0, 0.0);
    BodyState b = body(0.3, 0.0, 1.0, 0.0);
    auto [a2, b2] = resolve_collision(a, b, 1.0, 1.0, cfg);
    CHECK(a2 == a);
    CHECK(b2 == b);
  }

  SUBCASE("identical centers resolve along +x") {
    BodyState a = body(0.0, 0.0, 0.0, 0.0);
    BodyState b = body(0.0, 0.0, 0.0, 0.0);
    auto [a2, b2] = resolve_collision(a, b, 1.0, 1.0, cfg);
    CHECK(a2.position.x < b2.position.x);
  }
}

TEST_CASE("force-free motion is a straight line at every recorded frame") {
  PhysicsConfig cfg;
  InitialConditions init{
      {make_object(0, Color::red, Shape::sphere, Material::metal)},
      {body(-2.0, 0.5, 1.0, 0.0)}};
  SceneRecord rec = simulate(init, 1.0, cfg);
  REQUIRE(rec.frame_count() == 25);
  for (int f = 0; f < rec.frame_count(); ++f) {
    const double t = static_cast<double>(f) / cfg.record_fps;
    CHECK(rec.frames[static_cast<std::size_t>(f)][0].position.x ==
          doctest::Approx(-2.0 + t).epsilon(1e-12));
    CHECK(rec.frames[static_cast<std::size_t>(f)][0].position.y ==
          doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("target video at defaults records 125 frames") {
  PhysicsConfig cfg;
  InitialConditions init{
      {make_object(0, Color::red, Shape::sphere, Material::metal)},
      {body(0.0, 0.0, 0.3, 0.1)}};
  SceneRecord rec = simulate(init, 5.0, cfg);
  CHECK(rec.frame_count() == 125);
}

namespace {

// Independent oracle: classical RK4 on the same force law with a far finer
// grid, no contact handling (trajectories checked stay contact-free).
std::vector<Vec2> rk4_reference(const std::vector<ObjectSpec>& objects,
                                std::vector<BodyState> states, double duration,
                                double dt, const PhysicsConfig& cfg) {
  const int n = static_cast<int>(states.size());
  auto accel = [&](const std::vector<Vec2>& pos) {
    std::vector<Vec2> acc(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        BodyState si, sj;
        si.position = pos[static_cast<std::size_t>(i)];
        si.radius = states[static_cast<std::size_t>(i)].radius;
        sj.position = pos[static_cast<std::size_t>(j)];
        sj.radius = states[static_cast<std::size_t>(j)].radius;
        const Vec2 f = coulomb_force(
            si, sj, charge_value(objects[static_cast<std::size_t>(i)].charge),
            charge_value(objects[static_cast<std::size_t>(j)].charge), cfg);
        acc[static_cast<std::size_t>(i)] +=
            f / mass_value(objects[static_cast<std::size_t>(i)].mass);
        acc[static_cast<std::size_t>(j)] -=
            f / mass_value(objects[static_cast<std::size_t>(j)].mass);
      }
    }
    return acc;
  };
  std::vector<Vec2> pos, vel;
  for (const auto& s : states) {
    pos.push_back(s.position);
    vel.push_back(s.velocity);
  }
  const int steps = static_cast<int>(std::lround(duration / dt));
  for (int s = 0; s < steps; ++s) {
    const auto k1v = accel(pos);
    std::vector<Vec2> p2(pos), v2(vel);
    for (int i = 0; i < n; ++i) {
      p2[static_cast<std::size_t>(i)] += vel[static_cast<std::size_t>(i)] * (dt / 2);
      v2[static_cast<std::size_t>(i)] += k1v[static_cast<std::size_t>(i)] * (dt / 2);
    }
    const auto k2v = accel(p2);
    std::vector<Vec2> p3(pos), v3(vel);
    for (int i = 0; i < n; ++i) {
      p3[static_cast<std::size_t>(i)] += v2[static_cast<std::size_t>(i)] * (dt / 2);
      v3[static_cast<std::size_t>(i)] += k2v[static_cast<std::size_t>(i)] * (dt / 2);
    }
    const auto k3v = accel(p3);
    std::vector<Vec2> p4(pos), v4(vel);
    for (int i = 0; i < n; ++i) {
      p4[static_cast<std::size_t>(i)] += v3[static_cast<std::size_t>(i)] * dt;
      v4[static_cast<std::size_t>(i)] += k3v[static_cast<std::size_t>(i)] * dt;
    }
    const auto k4v = accel(p4);
    for (int i = 0; i < n; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      pos[ii] += (vel[ii] + v2[ii] * 2.0 + v3[ii] * 2.0 + v4[ii]) * (dt / 6.0);
      vel[ii] += (k1v[ii] + k2v[ii] * 2.0 + k3v[ii] * 2.0 + k4v[ii]) * (dt / 6.0);
    }
  }
  return pos;
}

}  // namespace

TEST_CASE("two like charges released at rest repel symmetrically") {
  PhysicsConfig cfg;
  std::vector<ObjectSpec> objects = {
      make_object(0, Color::red, Shape::sphere, Material::metal,
                  MassLevel::light, ChargeSign::positive),
      make_object(1, Color::blue, Shape::sphere, Material::metal,
                  MassLevel::light, ChargeSign::positive)};
  InitialConditions init{objects,
                         {body(-1.0, 0.0, 0.0, 0.0), body(1.0, 0.0, 0.0, 0.0)}};
  SceneRecord rec = simulate(init, 1.0, cfg);

  double prev_speed = -1.0;
  for (int f = 0; f < rec.frame_count(); ++f) {
    const auto& s0 = rec.frames[static_cast<std::size_t>(f)][0];
    const auto& s1 = rec.frames[static_cast<std::size_t>(f)][1];
    // mirror symmetry about the initial midpoint
    CHECK(std::abs(s0.position.x + s1.position.x) < 1e-12);
    CHECK(std::abs(s0.position.y) < 1e-12);
    if (f > 0) CHECK(s0.velocity.norm() > prev_speed);
    prev_speed = s0.velocity.norm();
  }

  // against the fine-grid RK4 oracle; the integrator is first order in dt,
  // so the budget is a few times dt * |accel|
  const auto oracle = rk4_reference(objects, init.states, 24.0 / 25.0, 1e-5, cfg);
  const auto& last = rec.frames.back();
  CHECK(std::abs(last[0].position.x - oracle[0].x) < 5e-3);
  CHECK(std::abs(last[1].position.x - oracle[1].x) < 5e-3);
}

TEST_CASE("momentum and energy stay conserved without drag or walls") {
  PhysicsConfig cfg;
  std::vector<ObjectSpec> objects = {
      make_object(0, Color::red, Shape::sphere, Material::metal,
                  MassLevel::light, ChargeSign::positive),
      make_object(1, Color::blue, Shape::sphere, Material::rubber,
                  MassLevel::light, ChargeSign::negative),
      make_object(2, Color::green, Shape::cube, Material::metal,
                  MassLevel::heavy)};
  InitialConditions init{objects,
                         {body(-1.5, 0.3, 0.6, -0.2), body(1.5, -0.3, -0.7, 0.1),
                          body(0.0, 1.5, 0.1, -0.5, 0.35)}};
  SimStats stats;
  SceneRecord rec = simulate(init, 5.0, cfg, RecordKind::target, &stats);
  REQUIRE(stats.wall_bounces == 0);

  const Vec2 p0 = total_momentum(rec.frames.front(), objects);
  const double e0 = kinetic_energy(rec.frames.front(), objects) +
                    coulomb_potential(rec.frames.front(), objects, cfg);
  const double scale = kinetic_energy(rec.frames.front(), objects) +
                       std::abs(coulomb_potential(rec.frames.front(), objects, cfg));
  const Vec2 p1 = total_momentum(rec.frames.back(), objects);
  const double e1 = kinetic_energy(rec.frames.back(), objects) +
                    coulomb_potential(rec.frames.back(), objects, cfg);
  const double elapsed = 124.0 / 25.0;
  const double momentum_drift = (p1 - p0).norm();
  const double energy_drift = std::abs(e1 - e0) / scale;
  CHECK(momentum_drift < 1e-6 * elapsed);
  CHECK(energy_drift < 1e-3 * elapsed);
}

TEST_CASE("globally flipping charges leaves trajectories bit-identical") {
  PhysicsConfig cfg;
  std::vector<ObjectSpec> objects = {
      make_object(0, Color::red, Shape::sphere, Material::metal,
                  MassLevel::light, ChargeSign::positive),
      make_object(1, Color::blue, Shape::sphere, Material::rubber,
                  MassLevel::heavy, ChargeSign::negative),
      make_object(2, Color::green, Shape::cube, Material::metal)};
  std::vector<BodyState> states = {body(-1.0, 0.2, 0.8, 0.0),
                                   body(1.2, -0.1, -0.5, 0.3),
                                   body(0.0, -1.4, 0.0, 0.6, 0.35)};
  SceneRecord a = simulate({objects, states}, 3.0, cfg);

  auto flipped = objects;
  flipped[0].charge = ChargeSign::negative;
  flipped[1].charge = ChargeSign::positive;
  SceneRecord b = simulate({flipped, states}, 3.0, cfg);
  CHECK(a.frames == b.frames);
}

TEST_CASE("heavy body deflects less than the light one") {
  PhysicsConfig cfg;
  std::vector<ObjectSpec> objects = {
      make_object(0, Color::red, Shape::sphere, Material::metal,
                  MassLevel::heavy),
      make_object(1, Color::blue, Shape::sphere, Material::metal,
                  MassLevel::light)};
  // slightly off-center hit so directions change
  InitialConditions init{objects, {body(-1.5, 0.05, 1.2, 0.0),
                                   body(1.5, -0.05, -1.2, 0.0)}};
  SceneRecord rec = simulate(init, 2.0, cfg);
  bool saw_collision = false;
  for (const auto& e : rec.events) {
    if (e.kind == EventKind::collision) saw_collision = true;
  }
  REQUIRE(saw_collision);

  auto direction_change = [&](std::size_t idx) {
    const Vec2 v0 = rec.frames.front()[idx].velocity;
    const Vec2 v1 = rec.frames.back()[idx].velocity;
    const double dot = v0.dot(v1) / (v0.norm() * v1.norm());
    return std::acos(std::clamp(dot, -1.0, 1.0));
  };
  CHECK(direction_change(0) < direction_change(1));
}

TEST_CASE("event detection") {
  PhysicsConfig cfg;

  SUBCASE("one contact episode logs exactly one collision") {
    std::vector<ObjectSpec> objects = {
        make_object(0, Color::red, Shape::sphere, Material::metal),
        make_object(1, Color::blue, Shape::sphere, Material::metal)};
    InitialConditions init{objects, {body(-1.0, 0.0, 1.0, 0.0),
                                     body(1.0, 0.0, -1.0, 0.0)}};
    SceneRecord rec = simulate(init, 2.0, cfg);
    int collisions = 0;
    for (const auto& e : rec.events) {
      if (e.kind == EventKind::collision) ++collisions;
    }
    CHECK(collisions == 1);
  }

  SUBCASE("opposite charges passing in range: attraction, no collision") {
    std::vector<ObjectSpec> objects = {
        make_object(0, Color::red, Shape::sphere, Material::metal,
                    MassLevel::light, ChargeSign::positive),
        make_object(1, Color::blue, Shape::sphere, Material::metal,
                    MassLevel::light, ChargeSign::negative)};
    // fast anti-parallel pass, wide enough that attraction cannot close the gap
    InitialConditions init{objects, {body(-3.0, 1.0, 2.4, 0.0),
                                     body(3.0, -1.0, -2.4, 0.0)}};
    SceneRecord rec = simulate(init, 2.0, cfg);
    double min_sep = 1e9;
    for (const auto& frame : rec.frames) {
      min_sep = std::min(min_sep,
                         (frame[0].position - frame[1].position).norm());
    }
    REQUIRE(min_sep > rec.frames[0][0].radius + rec.frames[0][1].radius);
    int attraction = 0, collision = 0;
    for (const auto& e : rec.events) {
      if (e.kind == EventKind::attraction) ++attraction;
      if (e.kind == EventKind::collision) ++collision;
    }
    CHECK(attraction == 1);
    CHECK(collision == 0);
  }

  SUBCASE("like charges turned back by repulsion log one interval") {
    std::vector<ObjectSpec> objects = {
        make_object(0, Color::red, Shape::sphere, Material::metal,
                    MassLevel::light, ChargeSign::positive),
        make_object(1, Color::blue, Shape::sphere, Material::metal,
                    MassLevel::light, ChargeSign::positive)};
    // the 8/r potential barrier turns them around near r = 2.3
    InitialConditions init{objects, {body(-2.0, 0.0, 1.2, 0.0),
                                     body(2.0, 0.0, -1.2, 0.0)}};
    SceneRecord rec = simulate(init, 2.5, cfg);
    int repulsion = 0, collision = 0;
    for (const auto& e : rec.events) {
      if (e.kind == EventKind::repulsion) ++repulsion;
      if (e.kind == EventKind::collision) ++collision;
    }
    CHECK(repulsion == 1);
    CHECK(collision == 0);
    // turned around: both velocities reversed by the end
    CHECK(rec.frames.back()[0].velocity.x < 0.0);
    CHECK(rec.frames.back()[1].velocity.x > 0.0);
  }

  SUBCASE("every object gets an 'in' at frame 0") {
    std::vector<ObjectSpec> objects = {
        make_object(0, Color::red, Shape::sphere, Material::metal)};
    InitialConditions init{objects, {body(0.0, 0.0, 0.5, 0.0)}};
    SceneRecord rec = simulate(init, 1.0, cfg);
    REQUIRE(rec.events.size() == 1);
    CHECK(rec.events[0].kind == EventKind::enter);
    CHECK(rec.events[0].frame == 0);
  }

  SUBCASE("open boundary produces an 'out' event") {
    PhysicsConfig open = cfg;
    open.open_boundary = true;
    std::vector<ObjectSpec> objects = {
        make_object(0, Color::red, Shape::sphere, Material::metal)};
    InitialConditions init{objects, {body(4.0, 0.0, 2.0, 0.0)}};
    SceneRecord rec = simulate(init, 2.0, open);
    bool saw_out = false;
    for (const auto& e : rec.events) {
      if (e.kind == EventKind::exit) saw_out = true;
    }
    CHECK(saw_out);
  }
}

TEST_CASE("closed walls reflect elastically and keep bodies inside") {
  PhysicsConfig cfg;
  std::vector<ObjectSpec> objects = {
      make_object(0, Color::red, Shape::sphere, Material::metal)};
  InitialConditions init{objects, {body(4.0, 0.0, 2.0, 0.0)}};
  SimStats stats;
  SceneRecord rec = simulate(init, 2.0, cfg, RecordKind::target, &stats);
  CHECK(stats.wall_bounces >= 1);
  for (const auto& frame : rec.frames) {
    CHECK(std::abs(frame[0].position.x) <= cfg.arena_half_extent - 0.3 + 1e-9);
  }
  // speed is preserved by the elastic wall
  CHECK(rec.frames.back()[0].velocity.norm() == doctest::Approx(2.0));
}

TEST_CASE("config validation rejects a non-divisible substep") {
  PhysicsConfig cfg;
  cfg.dt_substep = 0.003;
  CHECK_THROWS_AS(cfg.validate(), SimError);
}

TEST_CASE("simulate is deterministic") {
  PhysicsConfig cfg;
  const VideoSet a = make_valid_set(cfg);
  const VideoSet b = make_valid_set(cfg);
  CHECK(a == b);
}
