#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "prefset/prefmodel.hpp"
#include "prefset/search_result.hpp"

namespace prefset {

// Exhaustive reference answers for small catalogs (at most 20 items).
struct OracleResult {
  bool feasible = true;
  double value = 0;
  PropertyAssignment assignment;  // evaluation of the reported subset
  std::vector<int> subset;        // lexicographically first optimum
  long optimal_count = 0;         // subsets achieving the optimum
};

OracleResult brute_force_gai(const Catalog& catalog, const PropertySet& props,
                             const PreferenceModel& model);
// Best achievable property assignment under the conditional ranking.
OracleResult brute_force_tcp(const Catalog& catalog, const PropertySet& props,
                             const PreferenceModel& model);
// Same answer computed the other way around: assignments walked from the
// most preferred down, stopping at the first one some subset achieves.
OracleResult brute_force_tcp_by_assignments(const Catalog& catalog,
                                            const PropertySet& props,
                                            const PreferenceModel& model);

struct Graph {
  int num_vertices = 0;
  std::vector<std::pair<int, int>> edges;
};

// Literals are +v / -v with 1-based variable numbers.
struct CnfFormula {
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;
};

struct BuiltInstance {
  Catalog catalog;
  PropertySet props;
  PreferenceModel model;
};

// Items are vertices; every edge demands a selected endpoint and a
// counter keeps the selection small, so the answer is a minimum cover.
BuiltInstance gen_vertex_cover(const Graph& graph);
// Items are literals; the best reachable assignment is all-true exactly
// when the formula is satisfiable.
BuiltInstance gen_ksat(const CnfFormula& cnf);
// Additive variant whose optimum counts the satisfiable clauses.
BuiltInstance gen_max2sat(const CnfFormula& cnf);

struct RandomSpec {
  int num_items = 10;
  int num_attrs = 3;
  int max_domain = 4;
  int num_props = 4;
  int max_connectives = 2;
  bool allow_counters = true;
  bool allow_count_vs_count = true;
  bool tcp = true;
  bool with_cardinality = false;
};

BuiltInstance gen_random(std::uint64_t seed, const RandomSpec& spec);
// Single attribute, atomic equality formulas.
BuiltInstance gen_tractable_greedy(std::uint64_t seed);
// Single attribute, one item per value, at most one disjunction.
BuiltInstance gen_tractable_onevee(std::uint64_t seed);

// Film-selection suite: property prefixes of growing length plus a
// softened and a deliberately conflicting long variant.
enum class MovieVariant { p5, p9, p14, p14_soft, p14_tight };

Catalog movie_catalog(int size, std::uint64_t seed);
PropertySet movie_properties(MovieVariant variant);
PreferenceModel movie_model(MovieVariant variant);

enum class EngineVariant {
  subset_dfs,
  subset_bfs,
  bb_s,        // cold subproblems
  bb_s_ng,     // shared influence records
  bb_s_inc,    // warm starts and sibling reuse
  bb_s_ng_inc,
};

std::string engine_name(EngineVariant engine);

struct BenchInstance {
  std::string name;
  Catalog catalog;
  PropertySet props;
  PreferenceModel model;
};

struct BenchRow {
  std::string instance;
  std::string engine;
  bool completed = false;
  bool matches_reference = true;
  double wall_ms = 0;
  double value = 0;
  long csps_solved = 0;
  long property_backtracks = 0;
  long item_backtracks = 0;
  long nodes = 0;
};

struct BenchReport {
  std::vector<BenchRow> rows;

  std::string to_tsv() const;
};

struct BenchSpec {
  double timeout_ms = 60'000;
  long subset_node_budget = 1'000'000;
};

// Runs each engine on each instance; rows compare against the first
// completed engine of the same instance (assignment for rankings, value
// otherwise).
BenchReport run_benchmark(const std::vector<BenchInstance>& instances,
                          const std::vector<EngineVariant>& engines,
                          const BenchSpec& spec);

}  // namespace prefset
