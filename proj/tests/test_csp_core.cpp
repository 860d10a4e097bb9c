#include <numeric>

#include "doctest.h"
#include "prefset/csp_core.hpp"
#include "test_util.hpp"

using namespace prefset;

namespace {

// Senators universe: formula 0 tracks p1 satisfiers, 1 tracks p2,
// 2 tracks p3, 3 tracks everything (the cardinality scope).
CspUniverse senators_universe() {
  CspUniverse u;
  u.num_items = 4;
  u.formula_items = {{0, 1, 2}, {1, 2, 3}, {3}, {0, 1, 2, 3}};
  u.finalize();
  return u;
}

CspConstraint constraint(std::string id, int formula, Rel rel, long bound) {
  CspConstraint c;
  c.id = std::move(id);
  c.pos_formula = formula;
  c.rel = rel;
  c.bound = bound;
  return c;
}

}  // namespace

TEST_CASE("instance profile") {
  InstanceProfile p =
      instance_profile(testutil::senators_catalog(),
                       testutil::senators_properties());
  CHECK(p.n == 4);
  CHECK(p.a == 3);
  CHECK(p.m == 3);
  CHECK(p.k == 1);   // one disjunction in p1
  CHECK(p.d == 3);   // View has three values
  CHECK(p.mu == 3);  // three experienced members share one value
}

TEST_CASE("universe derives item views and overlaps") {
  CspUniverse u = senators_universe();
  CHECK(u.item_formulas[0] == std::vector<int>{0, 3});
  CHECK(u.item_formulas[3] == std::vector<int>{1, 2, 3});
  CHECK(u.pair_common[0][1] == 2);  // o2 and o3
  CHECK(u.pair_common[0][2] == 0);
  CHECK(u.pair_common[1][2] == 1);  // o4
  CHECK(u.pair_common[2][3] == 1);
}

TEST_CASE("monotonic pruning") {
  CspConstraint le = constraint("cap", 0, Rel::le, 2);
  CHECK_FALSE(monotonic_prune(le, 2, 0));
  CHECK(monotonic_prune(le, 3, 0));
  // Negative slack can still rescue the sum.
  CHECK_FALSE(monotonic_prune(le, 3, 1));
  CspConstraint eq = constraint("exact", 0, Rel::eq, 1);
  CHECK(monotonic_prune(eq, 2, 0));
  CHECK_FALSE(monotonic_prune(eq, 1, 0));
  // Lower bounds never die from growth.
  CspConstraint ge = constraint("need", 0, Rel::ge, 2);
  CHECK_FALSE(monotonic_prune(ge, 4, 0));
}

TEST_CASE("forward checking") {
  CspConstraint ge = constraint("need", 0, Rel::ge, 2);
  CHECK(forward_check(ge, 0, 2, 0));
  CHECK_FALSE(forward_check(ge, 0, 1, 0));
  CHECK(forward_check(ge, 1, 1, 0));
  CspConstraint eq = constraint("exact", 0, Rel::eq, 3);
  CHECK_FALSE(forward_check(eq, 1, 1, 0));
  CHECK(forward_check(eq, 1, 2, 0));
  // le with positive remainder is harmless: items can be left out.
  CspConstraint le = constraint("cap", 0, Rel::le, 1);
  CHECK(forward_check(le, 0, 3, 0));
}

TEST_CASE("interlock detection") {
  CspConstraint need = constraint("need", 0, Rel::ge, 3);
  CspConstraint cap = constraint("cap", 1, Rel::le, 1);
  CanMustState state;
  state.need_current = 1;
  state.cap_current = 1;
  state.remaining_need = 2;
  state.remaining_common = 2;
  // Needs two more, cap is full, and both candidates hit the cap.
  CHECK(can_must_check(need, cap, state));
  state.remaining_common = 1;
  state.remaining_need = 2;
  // One candidate avoids the cap, so the pair can still work out.
  CHECK_FALSE(can_must_check(need, cap, state));
  state.need_current = 3;
  // Satisfied need demands nothing.
  CHECK_FALSE(can_must_check(need, cap, state));
}

TEST_CASE("influence records match within containing contexts") {
  NoGoodStore store(100);
  int base = store.intern_space("root");
  int wide = store.intern_space("root|p1=t");
  CHECK(base != wide);
  CHECK(store.intern_space("root") == base);
  store.record(base, {1, 0}, 2);
  CHECK(store.size() == 1);
  CHECK(store.match({base}, {1, 0}, 2));
  CHECK(store.match({base, wide}, {1, 0}, 3));
  // Recorded deeper than the current position: not applicable.
  CHECK_FALSE(store.match({base}, {1, 0}, 1));
  CHECK_FALSE(store.match({wide}, {1, 0}, 2));
  CHECK_FALSE(store.match({base}, {1, 1}, 2));
  CHECK(store.recorded_depth(base, {1, 0}) == std::optional<int>(2));
  CHECK_FALSE(store.recorded_depth(base, {0, 0}).has_value());
  // Re-recording keeps the shallowest depth.
  store.record(base, {1, 0}, 5);
  CHECK(store.recorded_depth(base, {1, 0}) == std::optional<int>(2));
  store.record(base, {1, 0}, 1);
  CHECK(store.recorded_depth(base, {1, 0}) == std::optional<int>(1));
}

TEST_CASE("influence store evicts oldest entries at capacity") {
  NoGoodStore store(2);
  int space = store.intern_space("s");
  store.record(space, {0}, 1);
  store.record(space, {1}, 1);
  store.record(space, {2}, 1);
  CHECK(store.size() == 2);
  CHECK_FALSE(store.recorded_depth(space, {0}).has_value());
  CHECK(store.recorded_depth(space, {2}).has_value());
}

TEST_CASE("search finds the first solution in value order") {
  CspUniverse u = senators_universe();
  std::vector<int> order(4);
  std::iota(order.begin(), order.end(), 0);
  CspProblem problem;
  problem.universe = &u;
  problem.var_order = &order;
  problem.constraints = {constraint("size", 3, Rel::eq, 3)};
  CspSolveResult r = solve_csp(problem, {});
  CHECK(r.outcome == CspOutcome::sat);
  CHECK(r.assign == std::vector<uint8_t>{1, 1, 1, 0});
  CHECK(r.stats.backtracks == 1);  // all-in overshoots once

  problem.constraints.push_back(constraint("liberal", 2, Rel::ge, 1));
  r = solve_csp(problem, {});
  CHECK(r.outcome == CspOutcome::sat);
  CHECK(r.assign == std::vector<uint8_t>{1, 1, 0, 1});
}

TEST_CASE("search reports unsatisfiable demands") {
  CspUniverse u = senators_universe();
  std::vector<int> order(4);
  std::iota(order.begin(), order.end(), 0);
  CspProblem problem;
  problem.universe = &u;
  problem.var_order = &order;
  problem.constraints = {constraint("liberal", 2, Rel::ge, 2)};
  CspSolveResult r = solve_csp(problem, {});
  CHECK(r.outcome == CspOutcome::unsat);
  problem.trivially_unsat = true;
  problem.constraints.clear();
  r = solve_csp(problem, {});
  CHECK(r.outcome == CspOutcome::unsat);
}

TEST_CASE("difference constraints") {
  CspUniverse u = senators_universe();
  std::vector<int> order(4);
  std::iota(order.begin(), order.end(), 0);
  // More p1-only items than p2-only items: formulas 0 minus 1.
  CspConstraint diff;
  diff.id = "lead";
  diff.pos_formula = 0;
  diff.neg_formula = 1;
  diff.rel = Rel::ge;
  diff.bound = 1;
  CspProblem problem;
  problem.universe = &u;
  problem.var_order = &order;
  problem.constraints = {diff, constraint("size", 3, Rel::eq, 3)};
  CspSolveResult r = solve_csp(problem, {});
  REQUIRE(r.outcome == CspOutcome::sat);
  // Check the solution satisfies the difference for real.
  long pos = 0;
  long neg = 0;
  for (int i : u.formula_items[0]) pos += r.assign[i];
  for (int i : u.formula_items[1]) neg += r.assign[i];
  CHECK(rel_holds(pos - neg, Rel::ge, 1));
}

TEST_CASE("budget stops the enumeration") {
  CspUniverse u = senators_universe();
  std::vector<int> order(4);
  std::iota(order.begin(), order.end(), 0);
  CspProblem problem;
  problem.universe = &u;
  problem.var_order = &order;
  problem.constraints = {constraint("size", 3, Rel::eq, 3)};
  CspSolveConfig cfg;
  cfg.node_budget = 2;  // the first solution needs at least three picks
  CspSolveResult r = solve_csp(problem, cfg);
  CHECK(r.outcome == CspOutcome::budget);
  CHECK(r.stats.nodes == 2);
}

TEST_CASE("warm start resumes after the given leaf") {
  CspUniverse u = senators_universe();
  std::vector<int> order(4);
  std::iota(order.begin(), order.end(), 0);
  CspProblem problem;
  problem.universe = &u;
  problem.var_order = &order;
  problem.constraints = {constraint("size", 3, Rel::eq, 3)};
  // Verifying the current solution costs nothing new.
  std::vector<uint8_t> leaf = {1, 1, 1, 0};
  CspSolveConfig cfg;
  cfg.warm_leaf = &leaf;
  CspSolveResult r = solve_csp(problem, cfg);
  CHECK(r.outcome == CspOutcome::sat);
  CHECK(r.assign == leaf);
  CHECK(r.stats.nodes == 0);
  CHECK(r.stats.backtracks == 0);
  // An extra demand the old solution misses: search continues from it.
  problem.constraints.push_back(constraint("liberal", 2, Rel::ge, 1));
  r = solve_csp(problem, cfg);
  CHECK(r.outcome == CspOutcome::sat);
  CHECK(r.assign == std::vector<uint8_t>{1, 1, 0, 1});
  CHECK(r.stats.backtracks == 2);
}

TEST_CASE("advice toggles only change the effort") {
  CspUniverse u = senators_universe();
  std::vector<int> order(4);
  std::iota(order.begin(), order.end(), 0);
  CspProblem problem;
  problem.universe = &u;
  problem.var_order = &order;
  problem.constraints = {constraint("size", 3, Rel::eq, 3),
                         constraint("need", 0, Rel::ge, 2),
                         constraint("cap", 1, Rel::le, 2),
                         constraint("liberal", 2, Rel::ge, 1)};
  CspSolveConfig plain;
  plain.monotonic = false;
  plain.fc = false;
  plain.can_must = false;
  plain.nogoods = false;
  CspSolveResult base = solve_csp(problem, plain);
  REQUIRE(base.outcome == CspOutcome::sat);
  for (int bit = 0; bit < 3; ++bit) {
    CspSolveConfig cfg = plain;
    cfg.monotonic = bit == 0;
    cfg.fc = bit == 1;
    cfg.can_must = bit == 2;
    CspSolveResult r = solve_csp(problem, cfg);
    CHECK(r.outcome == CspOutcome::sat);
    CHECK(r.assign == base.assign);
  }
}

TEST_CASE("nogood toggle records and reuses dead ends") {
  CspUniverse u = senators_universe();
  std::vector<int> order(4);
  std::iota(order.begin(), order.end(), 0);
  CspProblem problem;
  problem.universe = &u;
  problem.var_order = &order;
  // Unsatisfiable: needs three liberals, only one exists.
  problem.constraints = {constraint("liberal", 2, Rel::ge, 3)};
  NoGoodStore store;
  CspSolveConfig cfg;
  cfg.monotonic = false;
  cfg.fc = false;
  cfg.can_must = false;
  cfg.nogoods = true;
  cfg.store = &store;
  cfg.record_space = store.intern_space("ctx");
  cfg.match_spaces = {cfg.record_space};
  CspSolveResult first = solve_csp(problem, cfg);
  CHECK(first.outcome == CspOutcome::unsat);
  CHECK(first.stats.nogoods_recorded > 0);
  CspSolveResult second = solve_csp(problem, cfg);
  CHECK(second.outcome == CspOutcome::unsat);
  CHECK(second.stats.nogood_hits > 0);
  CHECK(second.stats.nodes < first.stats.nodes);
}

TEST_CASE("static order ranks busy items first") {
  std::vector<std::vector<int>> scopes = {{0, 1, 2}, {1, 2, 3}, {3}};
  std::vector<double> ties = {0, 0, 0, 0};
  std::vector<int> order = static_order(4, scopes, ties);
  REQUIRE(order.size() == 4);
  // Items 1, 2, 3 sit in two scopes each; item 0 in one.
  CHECK(order.back() == 0);
  CHECK(order.front() == 1);  // index breaks the remaining tie
  ties = {0, 0, 5, 0};
  order = static_order(4, scopes, ties);
  CHECK(order.front() == 2);  // score outranks index
}
