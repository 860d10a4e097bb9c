#include <algorithm>

#include "doctest.h"
#include "prefset/properties.hpp"
#include "test_util.hpp"

using namespace prefset;

namespace {

bool contains(const std::vector<PropertyValue>& values, PropertyValue v) {
  return std::count(values.begin(), values.end(), v) > 0;
}

}  // namespace

TEST_CASE("property values distinguish booleans from counts") {
  auto t = PropertyValue::of_bool(true);
  auto c1 = PropertyValue::of_count(1);
  CHECK(t.as_bool());
  CHECK(c1.as_count() == 1);
  CHECK_FALSE(t == c1);  // same payload, different sort
  CHECK(t == PropertyValue::of_bool(true));
  CHECK(to_string(t) == "true");
  CHECK(to_string(c1) == "1");
}

TEST_CASE("value domains") {
  PropertySet props = testutil::senators_properties();
  std::vector<PropertyValue> dom = value_domain(props.at(0), 4);
  REQUIRE(dom.size() == 2);
  CHECK(dom[0] == PropertyValue::of_bool(true));
  CHECK(dom[1] == PropertyValue::of_bool(false));

  SetProperty counter;
  counter.kind = PropertyKind::counter;
  counter.phi = parse_formula("true", testutil::senators_schema());
  std::vector<PropertyValue> counts = value_domain(counter, 3);
  REQUIRE(counts.size() == 4);
  CHECK(counts.front() == PropertyValue::of_count(0));
  CHECK(counts.back() == PropertyValue::of_count(3));
}

TEST_CASE("evaluation over subsets") {
  Catalog catalog = testutil::senators_catalog();
  PropertySet props = testutil::senators_properties();
  CHECK(eval_property(props.at(0), catalog, {0, 1}) ==
        PropertyValue::of_bool(true));
  CHECK(eval_property(props.at(0), catalog, {0, 3}) ==
        PropertyValue::of_bool(false));
  CHECK(eval_property(props.at(2), catalog, {3}) ==
        PropertyValue::of_bool(true));
  CHECK(eval_property(props.at(2), catalog, {0, 1, 2}) ==
        PropertyValue::of_bool(false));

  SetProperty compare;
  compare.kind = PropertyKind::count_vs_count;
  AttributeSchema schema = testutil::senators_schema();
  compare.phi = parse_formula("Party = Republican", schema);
  compare.rel = Rel::gt;
  compare.psi = parse_formula("Party = Democrat", schema);
  CHECK(eval_property(compare, catalog, {0, 1, 2}) ==
        PropertyValue::of_bool(true));
  CHECK(eval_property(compare, catalog, {0, 2, 3}) ==
        PropertyValue::of_bool(false));
}

TEST_CASE("reachable values are exact") {
  Catalog catalog = testutil::senators_catalog();
  PropertySet props = testutil::senators_properties();
  // p1 with one satisfier chosen and two more available: both outcomes open.
  std::vector<PropertyValue> open =
      reachable_values(props.at(0), catalog, {0}, {1, 2});
  CHECK(contains(open, PropertyValue::of_bool(true)));
  CHECK(contains(open, PropertyValue::of_bool(false)));
  // p1 with two satisfiers already in: settled true.
  std::vector<PropertyValue> settled =
      reachable_values(props.at(0), catalog, {0, 1}, {3});
  REQUIRE(settled.size() == 1);
  CHECK(settled[0] == PropertyValue::of_bool(true));
  // p3 with o4 unavailable: settled false.
  std::vector<PropertyValue> lost =
      reachable_values(props.at(2), catalog, {0}, {1, 2});
  REQUIRE(lost.size() == 1);
  CHECK(lost[0] == PropertyValue::of_bool(false));

  SetProperty counter;
  counter.kind = PropertyKind::counter;
  counter.phi = parse_formula("Experience = experienced",
                              testutil::senators_schema());
  std::vector<PropertyValue> counts =
      reachable_values(counter, catalog, {1}, {2, 3});
  REQUIRE(counts.size() == 3);
  CHECK(counts.front() == PropertyValue::of_count(1));
  CHECK(counts.back() == PropertyValue::of_count(3));
}

TEST_CASE("properties translate to cardinality constraints") {
  Catalog catalog = testutil::senators_catalog();
  PropertySet props = testutil::senators_properties();
  // p1 true: count over {o1,o2,o3} at least 2.
  std::vector<CardinalityConstraint> cs =
      property_to_constraints(props.at(0), PropertyValue::of_bool(true),
                              catalog);
  REQUIRE(cs.size() == 1);
  CHECK(cs[0].pos == std::vector<int>{0, 1, 2});
  CHECK(cs[0].neg.empty());
  CHECK(cs[0].rel == Rel::ge);
  CHECK(cs[0].bound == 2);
  CHECK_FALSE(cs[0].constant.has_value());
  CHECK(cs[0].satisfied_by_sum(2));
  CHECK_FALSE(cs[0].satisfied_by_sum(1));
  // p1 false: strict complement, normalized away from lt.
  cs = property_to_constraints(props.at(0), PropertyValue::of_bool(false),
                               catalog);
  REQUIRE(cs.size() == 1);
  CHECK(cs[0].satisfied_by_sum(1));
  CHECK_FALSE(cs[0].satisfied_by_sum(2));
}

TEST_CASE("settled constraints collapse to constants") {
  Catalog catalog = testutil::senators_catalog();
  AttributeSchema schema = testutil::senators_schema();
  SetProperty p;
  p.kind = PropertyKind::count_vs_const;
  p.phi = parse_formula("View = liberal", schema);
  p.rel = Rel::ge;
  p.k = 0;  // nonnegative counts always comply
  std::vector<CardinalityConstraint> cs =
      property_to_constraints(p, PropertyValue::of_bool(true), catalog);
  REQUIRE(cs.size() == 1);
  CHECK(cs[0].constant == std::optional<bool>(true));
  cs = property_to_constraints(p, PropertyValue::of_bool(false), catalog);
  REQUIRE(cs.size() == 1);
  CHECK(cs[0].constant == std::optional<bool>(false));
  // Demanding more satisfiers than exist.
  p.rel = Rel::ge;
  p.k = 2;  // only o4 matches
  cs = property_to_constraints(p, PropertyValue::of_bool(true), catalog);
  REQUIRE(cs.size() == 1);
  CHECK(cs[0].constant == std::optional<bool>(false));
}

TEST_CASE("counter and comparison constraints carry signs") {
  Catalog catalog = testutil::senators_catalog();
  AttributeSchema schema = testutil::senators_schema();
  SetProperty counter;
  counter.kind = PropertyKind::counter;
  counter.phi = parse_formula("Party = Republican", schema);
  std::vector<CardinalityConstraint> cs =
      property_to_constraints(counter, PropertyValue::of_count(1), catalog);
  REQUIRE(cs.size() == 1);
  CHECK(cs[0].rel == Rel::eq);
  CHECK(cs[0].bound == 1);
  CHECK(cs[0].pos == std::vector<int>{0, 1});

  SetProperty compare;
  compare.kind = PropertyKind::count_vs_count;
  compare.phi = parse_formula("Party = Republican", schema);
  compare.rel = Rel::gt;
  compare.psi = parse_formula("Party = Democrat", schema);
  cs = property_to_constraints(compare, PropertyValue::of_bool(true), catalog);
  REQUIRE(cs.size() == 1);
  // Republicans minus democrats positive; items in both lists cancel.
  CHECK(cs[0].pos == std::vector<int>{0, 1});
  CHECK(cs[0].neg == std::vector<int>{2, 3});
  CHECK(cs[0].satisfied_by_sum(1));
  CHECK_FALSE(cs[0].satisfied_by_sum(0));
}

TEST_CASE("offline conflict classification") {
  AttributeSchema schema = testutil::senators_schema();
  auto prop = [&](Rel rel, long k) {
    SetProperty p;
    p.kind = PropertyKind::count_vs_const;
    p.phi = parse_formula("Party = Republican", schema);
    p.rel = rel;
    p.k = k;
    return p;
  };
  // Same formula, incompatible bounds.
  ConflictReport report =
      resolve_offline_conflicts({prop(Rel::eq, 1), prop(Rel::eq, 2)});
  REQUIRE(report.entries.size() == 1);
  CHECK(report.entries[0].kind == ConflictKind::mutually_exclusive);
  // ge 2 implies ge 1.
  report = resolve_offline_conflicts({prop(Rel::ge, 2), prop(Rel::ge, 1)});
  REQUIRE(report.entries.size() == 1);
  CHECK(report.entries[0].kind == ConflictKind::first_subsumes_second);
  report = resolve_offline_conflicts({prop(Rel::ge, 1), prop(Rel::ge, 2)});
  REQUIRE(report.entries.size() == 1);
  CHECK(report.entries[0].kind == ConflictKind::second_subsumes_first);
  // Overlapping window: compatible, nothing forced.
  report = resolve_offline_conflicts({prop(Rel::ge, 1), prop(Rel::le, 2)});
  REQUIRE(report.entries.size() == 1);
  CHECK(report.entries[0].kind == ConflictKind::compatible);
  // Identical demands.
  report = resolve_offline_conflicts({prop(Rel::ge, 1), prop(Rel::gt, 0)});
  REQUIRE(report.entries.size() == 1);
  CHECK(report.entries[0].kind == ConflictKind::equivalent);
  // Different formulas never pair up.
  SetProperty other = prop(Rel::ge, 1);
  other.phi = parse_formula("View = liberal", schema);
  report = resolve_offline_conflicts({prop(Rel::ge, 1), other});
  CHECK(report.entries.empty());
}
