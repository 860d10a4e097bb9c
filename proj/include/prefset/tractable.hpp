#pragma once

#include <utility>
#include <vector>

#include "prefset/csp_core.hpp"
#include "prefset/prefmodel.hpp"
#include "prefset/search_result.hpp"

namespace prefset {

// Syntactic features deciding membership in the polynomial subclasses.
struct TractableClassProfile {
  InstanceProfile sizes;
  bool has_counter = false;
  bool has_negation = false;
  bool atoms_equality_only = true;
  bool has_cardinality = false;
  // Single attribute, atomic equality formulas, no counters, no hard
  // cardinality: solvable by the greedy value-demotion pass.
  bool greedy_eligible = false;
  // Single attribute, positive formulas of at most one disjunction,
  // every attribute value held by at most one item: solvable through
  // 2-SAT feasibility checks.
  bool two_sat_eligible = false;
};

TractableClassProfile check_class(const Catalog& catalog,
                                  const PropertySet& props,
                                  const PreferenceModel& model);

// Literals are 2*var for the positive phase, 2*var+1 for the negative.
struct TwoSatInstance {
  int num_vars = 0;
  std::vector<std::pair<int, int>> clauses;

  void add_clause(int a, int b) { clauses.emplace_back(a, b); }
  void add_unit(int l) { clauses.emplace_back(l, l); }
};

struct TwoSatSolution {
  bool sat = false;
  std::vector<uint8_t> assign;  // variables untouched by clauses get false
};

TwoSatSolution solve_2sat(const TwoSatInstance& instance);

// Clauses over item selection variables pinning the property to `value`.
// Pre: the property's formula has at most two satisfying items.
struct TranslationResult {
  bool infeasible = false;  // no admissible count exists
  std::vector<std::pair<int, int>> clauses;
};

TranslationResult translate_to_2sat(const SetProperty& p, bool value,
                                    const Catalog& catalog);

// Greedy pass for the atomic-equality class: walk properties from most
// to least important, demote a value only when its admissible counts
// are incompatible with what is already committed.
SearchResult solve_atomic_greedy(const Catalog& catalog,
                                 const PropertySet& props,
                                 const PreferenceModel& model);

// 2-SAT pass for the one-disjunction class: commit each property to its
// best jointly-feasible value, then read the subset off the final model.
SearchResult solve_onevee(const Catalog& catalog, const PropertySet& props,
                          const PreferenceModel& model);

}  // namespace prefset
