#include <doctest.h>

#include "fixtures.hpp"
#include "program_gen.hpp"
#include "physq/program.hpp"

using namespace physq;
using namespace physq::testing;

namespace {

World oracle_world(const VideoSet& set) {
  World w;
  w.target = &set.target;
  w.future = &set.future;
  w.props = PropertiesView::from_roster(set.roster);
  return w;
}

}  // namespace

TEST_CASE("parser handles minimal compositions") {
  Program p = parse_program("(count (filter_charged (objects)))");
  REQUIRE(p.nodes.size() == 3);
  CHECK(p.nodes[0].op == "objects");
  CHECK(p.nodes[1].op == "filter_charged");
  CHECK(p.nodes[2].op == "count");
  CHECK(p.result_type() == ValType::integer);
  CHECK(print_program(p) == "(count (filter_charged (objects)))");
}

TEST_CASE("parser errors carry distinct categories") {
  SUBCASE("unbalanced input fails at EOF") {
    try {
      parse_program("(count (objects");
      FAIL("expected parse error");
    } catch (const ParseError& e) {
      CHECK(e.kind == ParseErrorKind::syntax);
    }
  }
  SUBCASE("unknown op") {
    try {
      parse_program("(frobnicate (objects))");
      FAIL("expected parse error");
    } catch (const ParseError& e) {
      CHECK(e.kind == ParseErrorKind::unknown_op);
    }
  }
  SUBCASE("type mismatch") {
    try {
      parse_program("(filter_before (events) (objects))");
      FAIL("expected parse error");
    } catch (const ParseError& e) {
      CHECK(e.kind == ParseErrorKind::type);
    }
  }
  SUBCASE("missing argument") {
    try {
      parse_program("(count)");
      FAIL("expected parse error");
    } catch (const ParseError& e) {
      CHECK(e.kind == ParseErrorKind::arity);
    }
  }
  SUBCASE("extra argument") {
    try {
      parse_program("(negate (exist (objects)) (objects))");
      FAIL("expected parse error");
    } catch (const ParseError& e) {
      CHECK(e.kind == ParseErrorKind::arity);
    }
  }
}

TEST_CASE("executor basics on the hand-built set") {
  const VideoSet set = make_valid_set();
  World w = oracle_world(set);

  CHECK(value_to_answer(execute(parse_program("(count (objects))"), w)) == "3");

  // object 2 is the heavy one, object 0 light
  CHECK(value_to_answer(execute(parse_program(
            "(is_heavier (unique (filter_static_attr (objects) green)) "
            "(unique (filter_static_attr (objects) red)))"), w)) == "yes");
  CHECK(value_to_answer(execute(parse_program(
            "(is_lighter (unique (filter_static_attr (objects) green)) "
            "(unique (filter_static_attr (objects) red)))"), w)) == "no");

  // 0 and 1 carry opposite charge
  CHECK(value_to_answer(execute(parse_program(
            "(is_opposite_charged (unique (filter_static_attr (objects) red)) "
            "(unique (filter_static_attr (objects) blue)))"), w)) == "yes");
  CHECK(value_to_answer(execute(parse_program(
            "(is_same_charged (unique (filter_static_attr (objects) red)) "
            "(unique (filter_static_attr (objects) blue)))"), w)) == "no");

  CHECK(value_to_answer(execute(parse_program(
            "(count (filter_charged (objects)))"), w)) == "2");
  CHECK(value_to_answer(execute(parse_program(
            "(exist (filter_heavy (objects)))"), w)) == "yes");
  CHECK(value_to_answer(execute(parse_program(
            "(query_both_attribute (filter_charged (objects)) color)"), w)) ==
        "red and blue");
  CHECK(value_to_answer(execute(parse_program(
            "(query_attribute (unique (filter_heavy (objects))) shape)"), w)) ==
        "cube");
}

TEST_CASE("executor error categories") {
  const VideoSet set = make_valid_set();
  World w = oracle_world(set);

  SUBCASE("unique on a non-singleton set") {
    try {
      execute(parse_program("(unique (objects))"), w);
      FAIL("expected exec error");
    } catch (const ExecError& e) {
      CHECK(e.kind == ExecErrorKind::non_unique_referent);
    }
  }
  SUBCASE("counterfactual without its record") {
    try {
      execute(parse_program("(counterfactual_mass_heavy (unique "
                            "(filter_static_attr (objects) red)))"), w);
      FAIL("expected exec error");
    } catch (const ExecError& e) {
      CHECK(e.kind == ExecErrorKind::missing_counterfactual);
      CHECK(e.op_index >= 0);
    }
  }
  SUBCASE("missing future") {
    World no_future = w;
    no_future.future = nullptr;
    try {
      execute(parse_program("(count (unseen_events))"), no_future);
      FAIL("expected exec error");
    } catch (const ExecError& e) {
      CHECK(e.kind == ExecErrorKind::missing_future);
    }
  }
}

TEST_CASE("moving predicate and directions") {
  CHECK_FALSE(moving_predicate(body(0, 0, 0, 0)));
  CHECK(moving_predicate(body(0, 0, 1, 0)));
  CHECK_FALSE(moving_predicate(body(0, 0, 0.04, 0)));

  CHECK(direction_name({1, 0}) == "right");
  CHECK(direction_name({1, 1}) == "up-right");
  CHECK(direction_name({0, 1}) == "up");
  CHECK(direction_name({-1, 1}) == "up-left");
  CHECK(direction_name({-1, 0}) == "left");
  CHECK(direction_name({-1, -1}) == "down-left");
  CHECK(direction_name({0, -1}) == "down");
  CHECK(direction_name({1, -1}) == "down-right");
  CHECK(direction_name({0.0, 0.0}) == "stationary");
}

TEST_CASE("event operations") {
  const VideoSet set = make_valid_set();
  World w = oracle_world(set);

  // the target has a collision between 0 and 1: find its partner
  const std::string part =
      "(query_attribute (get_col_partner (filter_order (filter_event (events) "
      "(filter_static_attr (objects) red) collision) first) (unique "
      "(filter_static_attr (objects) red))) color)";
  CHECK(value_to_answer(execute(parse_program(part), w)) == "blue");

  // frames and ordering
  const auto first_frame = execute(
      parse_program("(get_frame (filter_order (events) first))"), w);
  CHECK(std::get<FrameVal>(first_frame).frame == 0);
  CHECK(std::get<FrameVal>(execute(parse_program("(get_frame (end))"), w))
            .frame == set.target.frame_count() - 1);
  CHECK(std::get<FrameVal>(execute(parse_program("(get_frame (start))"), w))
            .frame == 0);

  // filter_before/after partition events around a pivot
  const auto all = std::get<EventListVal>(execute(parse_program("(events)"), w));
  const auto before = std::get<EventListVal>(execute(
      parse_program("(filter_before (events) (filter_order (events) last))"), w));
  const auto after = std::get<EventListVal>(execute(
      parse_program("(filter_after (events) (filter_order (events) first))"), w));
  CHECK(before.events.size() < all.events.size());
  CHECK(after.events.size() < all.events.size());

  // belong_to: the first event belongs to the full list; special markers never do
  CHECK(value_to_answer(execute(parse_program(
            "(belong_to (filter_order (events) first) (events))"), w)) == "yes");
  CHECK(value_to_answer(execute(parse_program(
            "(belong_to (start) (events))"), w)) == "no");
}

TEST_CASE("frame literals flow through dynamic filters") {
  const VideoSet set = make_valid_set();
  World w = oracle_world(set);
  const auto v = execute(
      parse_program("(count (filter_dynamic_attr (objects) moving 0))"), w);
  CHECK(std::get<IntVal>(v).value == 3);  // everything starts in motion
  const auto still = execute(parse_program(
      "(count (filter_dynamic_attr (objects) stationary (get_frame (end))))"), w);
  CHECK(std::get<IntVal>(still).value >= 0);
}

TEST_CASE("1000 random well-typed programs round-trip and execute cleanly") {
  const VideoSet set = make_valid_set();
  World w = oracle_world(set);
  // give the executor one counterfactual world so those ops can resolve
  World with_cf = w;
  for (const char* edit : {"mass_heavy", "mass_light", "uncharged",
                           "opposite_charged"}) {
    for (const auto& o : set.roster) {
      with_cf.counterfactual[{edit, o.id}] = &set.target;
    }
  }

  ProgramSampler sampler(2024);
  int executed = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::string text = sampler.sample();
    CAPTURE(text);
    Program p = parse_program(text);
    const std::string printed = print_program(p);
    Program q = parse_program(printed);
    CHECK(q == p);
    CHECK(print_program(q) == printed);

    // type soundness: execution never trips a tag mismatch
    try {
      execute(p, with_cf);
      ++executed;
    } catch (const ExecError& e) {
      CHECK(e.kind != ExecErrorKind::type_mismatch);
    }
  }
  CHECK(executed > 0);
}

TEST_CASE("operation table covers every published row") {
  // one clause per row of the operation table
  static const char* rows[] = {
      "counterfactual_mass_heavy", "counterfactual_mass_light",
      "counterfactual_uncharged", "counterfactual_opposite_charged",
      "filter_heavy", "filter_light", "filter_charged", "filter_uncharged",
      "filter_static_attr", "filter_dynamic_attr", "filter_event",
      "get_col_partner", "filter_before", "filter_after", "filter_order",
      "get_frame", "unique", "start", "end", "objects", "events",
      "unseen_events", "query_both_attribute", "query_direction", "is_heavier",
      "is_lighter", "query_attribute", "count", "exist", "belong_to", "negate"};
  for (const char* row : rows) {
    CAPTURE(row);
    CHECK(find_op(row) != nullptr);
  }
}
